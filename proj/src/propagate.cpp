#include "qgc/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgc/core.hpp"

namespace qgc {

// ---- trajectory ----

const Eigen::VectorXcd& Trajectory::final_state() const {
  if (states.empty()) throw Error("trajectory is empty");
  return states.back();
}

double Trajectory::final_time() const {
  if (t.empty()) throw Error("trajectory is empty");
  return t.back();
}

double Trajectory::max_norm_drift() const {
  double worst = 0;
  for (double n : norm) worst = std::max(worst, std::fabs(n - norm.front()));
  return worst;
}

// ---- propagation helpers ----

namespace {

class Recorder {
 public:
  Recorder(Trajectory& traj, long long total_steps, int max_nodes) : traj_(traj) {
    stride_ = std::max<long long>(1, (total_steps + max_nodes - 1) / std::max(max_nodes, 2));
  }

  void record(double t, const Eigen::VectorXcd& psi, bool force = false) {
    if (!force && step_++ % stride_ != 0) return;
    traj_.t.push_back(t);
    traj_.states.push_back(psi);
    traj_.norm.push_back(psi.norm());
    traj_.h1.push_back(hs_norm(psi, 1.0));
    traj_.h3.push_back(hs_norm(psi, 3.0));
  }

 private:
  Trajectory& traj_;
  long long stride_ = 1;
  long long step_ = 0;
};

Eigen::MatrixXcd hermitian_exponential(const Eigen::MatrixXcd& H, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw Error("propagator eigendecomposition failed");
  Eigen::VectorXcd diag(es.eigenvalues().size());
  for (int i = 0; i < diag.size(); ++i)
    diag(i) = std::polar(1.0, -dt * es.eigenvalues()(i));
  return es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();
}

// two Newton polar steps pull an almost-unitary product back onto the group
void reunitarize(Eigen::MatrixXcd& U) {
  for (int i = 0; i < 2; ++i) U = 0.5 * (U + U.adjoint().inverse());
}

// 4th-order commutator-free two-exponential step over [t, t+dt]
Eigen::MatrixXcd cf4_step(const ControlSignal& u, const Eigen::MatrixXcd& A,
                          const Eigen::MatrixXcd& B, double t, double dt) {
  const double root = std::sqrt(3.0) / 6.0;
  const double c1 = 0.5 - root, c2 = 0.5 + root;
  const double a1 = 0.25 + root, a2 = 0.25 - root;
  const double u1 = u(t + c1 * dt), u2 = u(t + c2 * dt);
  const Eigen::MatrixXcd H_first = 0.5 * A + (a1 * u1 + a2 * u2) * B;
  const Eigen::MatrixXcd H_second = 0.5 * A + (a2 * u1 + a1 * u2) * B;
  return hermitian_exponential(H_second, dt) * hermitian_exponential(H_first, dt);
}

// The exact flow is unitary, so the state norm is a known invariant; restoring
// it after every step keeps per-step rounding from accumulating across long runs.
void restore_norm(Eigen::VectorXcd& psi, double norm0) {
  const double n = psi.norm();
  if (n > 0) psi *= norm0 / n;
}

void evolve_piecewise(const ControlSignal& u, const Eigen::MatrixXcd& A,
                      const Eigen::MatrixXcd& B, double dt_max, Eigen::VectorXcd& psi,
                      Recorder& rec) {
  const double norm0 = psi.norm();
  const auto& bp = u.breakpoints();
  const auto& vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double len = bp[i + 1] - bp[i];
    const int steps = std::max(1, static_cast<int>(std::ceil(len / dt_max - 1e-12)));
    const double dt = len / steps;
    Eigen::MatrixXcd H = A + vals[i] * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) throw Error("propagator eigendecomposition failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (int r = 0; r < phases.size(); ++r)
      phases(r) = std::polar(1.0, -dt * es.eigenvalues()(r));
    for (int s = 0; s < steps; ++s) {
      psi = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
      restore_norm(psi, norm0);
      rec.record(bp[i] + dt * (s + 1), psi, s + 1 == steps);
    }
  }
}

void evolve_trig_direct(const ControlSignal& u, const Eigen::MatrixXcd& A,
                        const Eigen::MatrixXcd& B, double t0, double T_len, double dt_max,
                        Eigen::VectorXcd& psi, Recorder& rec) {
  if (T_len <= 0) return;
  const double norm0 = psi.norm();
  const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(T_len / dt_max - 1e-12)));
  const double dt = T_len / static_cast<double>(steps);
  for (long long s = 0; s < steps; ++s) {
    psi = cf4_step(u, A, B, t0 + dt * static_cast<double>(s), dt) * psi;
    restore_norm(psi, norm0);
    rec.record(t0 + dt * static_cast<double>(s + 1), psi, s + 1 == steps);
  }
}

void evolve_periodic(const ControlSignal& u, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                     double period, long long n_periods, double dt_max, Eigen::VectorXcd& psi,
                     Recorder& rec) {
  const int steps = std::max(20, static_cast<int>(std::ceil(period / dt_max - 1e-12)));
  const double dt = period / steps;
  Eigen::MatrixXcd U_period = Eigen::MatrixXcd::Identity(A.rows(), A.cols());
  for (int s = 0; s < steps; ++s) U_period = cf4_step(u, A, B, dt * s, dt) * U_period;
  reunitarize(U_period);

  long long stride = 1;
  while (n_periods / stride > 2048) stride *= 2;
  Eigen::MatrixXcd U_stride = U_period;
  for (long long s = 1; s < stride; s *= 2) {
    U_stride = U_stride * U_stride;
    reunitarize(U_stride);
  }

  const double norm0 = psi.norm();
  long long done = 0;
  while (done + stride <= n_periods) {
    psi = U_stride * psi;
    restore_norm(psi, norm0);
    done += stride;
    rec.record(period * static_cast<double>(done), psi, done == n_periods);
  }
  while (done < n_periods) {
    psi = U_period * psi;
    restore_norm(psi, norm0);
    ++done;
    rec.record(period * static_cast<double>(done), psi, done == n_periods);
  }
}

}  // namespace

// ---- evolve ----

Trajectory evolve(const Eigen::VectorXcd& psi0, const ControlSignal& u,
                  const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat, double dt_max,
                  const EvolveOptions& opts) {
  const int N = static_cast<int>(psi0.size());
  if (N < 1) throw Error("empty initial state");
  if (Adiag.size() != N || Bmat.rows() != N || Bmat.cols() != N)
    throw Error("state, drift, and coupling dimensions disagree");
  if (!(dt_max > 0)) throw Error("dt_max must be positive");

  Trajectory traj;
  if (std::fabs(psi0.norm() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "initial state norm deviates from 1 by " << std::fabs(psi0.norm() - 1.0);
    traj.warnings.push_back(os.str());
  }

  const Eigen::MatrixXcd A = Adiag.cast<std::complex<double>>().asDiagonal();
  Eigen::VectorXcd psi = psi0;
  const double T = u.horizon();

  if (u.is_piecewise()) {
    const long long total = std::max<long long>(1, static_cast<long long>(std::ceil(T / dt_max)));
    Recorder rec(traj, total, opts.max_nodes);
    rec.record(0.0, psi, true);
    evolve_piecewise(u, A, Bmat, dt_max, psi, rec);
    return traj;
  }

  if (u.terms().empty()) {  // constant offset: one exact piece
    ControlSignal flat = T > 0 ? ControlSignal::piecewise({0.0, T}, {u.offset()})
                               : ControlSignal::zero(0.0);
    const long long total = std::max<long long>(1, static_cast<long long>(std::ceil(T / dt_max)));
    Recorder rec(traj, total, opts.max_nodes);
    rec.record(0.0, psi, true);
    evolve_piecewise(flat, A, Bmat, dt_max, psi, rec);
    return traj;
  }

  double w_max = 0;
  for (const auto& term : u.terms()) w_max = std::max(w_max, term.omega);
  const double shortest_period = 2 * kPi / w_max;
  if (dt_max > shortest_period / 20 * (1 + 1e-12)) {
    std::ostringstream os;
    os << "dt_max too coarse for the signal's top frequency (need <= " << shortest_period / 20
       << ")";
    throw Error(os.str());
  }

  const double period = 2 * kPi / u.terms().front().omega;
  const long long whole = static_cast<long long>(std::floor(T / period + 1e-9));
  const bool periodic_ok = opts.allow_periodic_fast_path && u.terms().size() == 1 && whole > 32;

  if (periodic_ok) {
    const double rem = std::max(0.0, T - period * static_cast<double>(whole));
    Recorder rec(traj, 2048 + static_cast<long long>(std::ceil(rem / dt_max)), opts.max_nodes);
    rec.record(0.0, psi, true);
    evolve_periodic(u, A, Bmat, period, whole, dt_max, psi, rec);
    // u has a whole number of periods behind us, so the remaining stretch
    // matches the signal restarted at phase zero
    evolve_trig_direct(u, A, Bmat, 0.0, rem, dt_max, psi, rec);
    if (rem > 0) traj.t.back() = T;
    return traj;
  }

  const long long total = std::max<long long>(1, static_cast<long long>(std::ceil(T / dt_max)));
  Recorder rec(traj, total, opts.max_nodes);
  rec.record(0.0, psi, true);
  evolve_trig_direct(u, A, Bmat, 0.0, T, dt_max, psi, rec);
  return traj;
}

// ---- mild-solution cross-check ----

PicardResult duhamel_picard(const Eigen::VectorXcd& psi0, const ControlSignal& u,
                            const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat, double T,
                            int n_iter, int n_quad) {
  const int N = static_cast<int>(psi0.size());
  if (Adiag.size() != N || Bmat.rows() != N || Bmat.cols() != N)
    throw Error("state, drift, and coupling dimensions disagree");
  if (!(T > 0) || n_iter < 1 || n_quad < 2) throw Error("invalid Picard parameters");

  const int nodes = n_quad + 1;
  const double ds = T / n_quad;
  // interaction-picture iterate: chi(s) = e^{+iAs} psi(s)
  Eigen::MatrixXcd chi = psi0.replicate(1, nodes);
  Eigen::MatrixXcd rotatedB(N, N);
  std::vector<Eigen::VectorXcd> drift_pos(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    Eigen::VectorXcd ph(N);
    for (int k = 0; k < N; ++k) ph(k) = std::polar(1.0, Adiag(k) * ds * i);
    drift_pos[static_cast<std::size_t>(i)] = ph;
  }

  PicardResult result;
  Eigen::MatrixXcd g(N, nodes);
  for (int it = 0; it < n_iter; ++it) {
    // g(s) = u(s) e^{+iAs} B e^{-iAs} chi(s)
    for (int i = 0; i < nodes; ++i) {
      const auto& ph = drift_pos[static_cast<std::size_t>(i)];
      const Eigen::VectorXcd psi_i = ph.conjugate().asDiagonal() * chi.col(i);
      g.col(i) = u(ds * i) * (ph.asDiagonal() * (Bmat * psi_i));
    }
    Eigen::MatrixXcd next(N, nodes);
    next.col(0) = psi0;
    Eigen::VectorXcd prefix = Eigen::VectorXcd::Zero(N);
    for (int i = 1; i < nodes; ++i) {
      prefix += 0.5 * ds * (g.col(i - 1) + g.col(i));
      next.col(i) = psi0 - std::complex<double>(0, 1) * prefix;
    }
    const double delta = (next - chi).cwiseAbs().maxCoeff();
    result.deltas.push_back(delta);
    chi.swap(next);
    ++result.iterations;
    if (delta < 1e-14 * (1 + psi0.norm())) break;
    if (result.deltas.size() >= 2 && delta > 10 * result.deltas[result.deltas.size() - 2] &&
        delta > 1.0)
      throw Error("mild-solution iteration diverges; subdivide the horizon");
  }
  const auto& ph_T = drift_pos.back();
  result.psi = ph_T.conjugate().asDiagonal() * chi.col(nodes - 1);
  return result;
}

// ---- fidelity ----

double fidelity(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  if (psi.size() != phi.size()) throw Error("fidelity needs states of equal dimension");
  return std::min(1.0, std::abs(phi.dot(psi)));
}

double fidelity(const QuantumState& psi, const QuantumState& phi) {
  return fidelity(psi.c, phi.c);
}

}  // namespace qgc
