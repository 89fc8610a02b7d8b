#include "qgc/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgc/core.hpp"
#include "qgc/spectral.hpp"

namespace qgc {

// ---- control signals ----

ControlSignal ControlSignal::zero(double T) {
  if (T < 0) throw Error("control horizon must be nonnegative");
  ControlSignal u;
  u.form_ = Form::Piecewise;
  u.horizon_ = T;
  u.breakpoints_ = T > 0 ? std::vector<double>{0.0, T} : std::vector<double>{0.0};
  u.values_ = T > 0 ? std::vector<double>{0.0} : std::vector<double>{};
  return u;
}

ControlSignal ControlSignal::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1 || values.empty())
    throw Error("piecewise signal needs n+1 breakpoints for n values");
  if (breakpoints.front() != 0.0)
    throw Error("piecewise signal must start at t = 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw Error("piecewise breakpoints must be strictly increasing");
  ControlSignal u;
  u.form_ = Form::Piecewise;
  u.horizon_ = breakpoints.back();
  u.breakpoints_ = std::move(breakpoints);
  u.values_ = std::move(values);
  return u;
}

ControlSignal ControlSignal::trig(double T, double offset, std::vector<TrigTerm> terms) {
  if (!(T >= 0)) throw Error("control horizon must be nonnegative");
  for (const auto& t : terms)
    if (!(t.omega > 0)) throw Error("trig terms need positive frequencies");
  ControlSignal u;
  u.form_ = Form::Trig;
  u.horizon_ = T;
  u.offset_ = offset;
  u.terms_ = std::move(terms);
  return u;
}

double ControlSignal::operator()(double t) const {
  if (form_ == Form::Piecewise) {
    if (values_.empty() || t < breakpoints_.front() || t > horizon_) return 0.0;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    if (idx > 0) --idx;
    if (idx >= values_.size()) idx = values_.size() - 1;
    return values_[idx];
  }
  double v = offset_;
  for (const auto& term : terms_)
    v += term.p * std::cos(term.omega * t) + term.q * std::sin(term.omega * t);
  return v;
}

// ---- budgets ----

namespace {

// Antiderivative of |sin|: F'(x) = |sin x|, continuous, F(0) = 0.
long double abs_sin_antiderivative(long double x) {
  const long double n = std::floor(x / kPiL);
  return 2 * n + 1 - std::cos(x - kPiL * n);
}

Budget piecewise_budget(const ControlSignal& u) {
  Budget b;
  const auto& v = u.values();
  for (std::size_t i = 1; i < v.size(); ++i) b.bv += std::fabs(v[i] - v[i - 1]);
  for (double x : v) b.linf = std::max(b.linf, std::fabs(x));
  b.t_linf = u.horizon() * b.linf;
  return b;
}

Budget single_harmonic_budget(const ControlSignal& u) {
  const auto& term = u.terms().front();
  const double R = std::hypot(term.p, term.q);
  const double chi = std::atan2(term.q, term.p);  // u = R cos(w t - chi) + offset
  const double w = term.omega, T = u.horizon();
  Budget b;
  b.bv = static_cast<double>(
      R * (abs_sin_antiderivative(static_cast<long double>(w) * T - chi) -
           abs_sin_antiderivative(-static_cast<long double>(chi))));
  b.linf = std::max(std::fabs(u(0.0)), std::fabs(u(T)));
  // interior extrema at w t - chi = n pi; one of each parity suffices
  const long long n_lo = static_cast<long long>(std::ceil(-chi / kPi));
  const long long n_hi = static_cast<long long>(std::floor((w * T - chi) / kPi));
  for (long long n = n_lo; n <= n_hi && n <= n_lo + 1; ++n)
    b.linf = std::max(b.linf, std::fabs(u.offset() + (n % 2 == 0 ? R : -R)));
  b.t_linf = T * b.linf;
  return b;
}

Budget scanned_trig_budget(const ControlSignal& u) {
  const double T = u.horizon();
  double wmax = 0;
  for (const auto& t : u.terms()) wmax = std::max(wmax, t.omega);
  auto du = [&](double t) {
    double v = 0;
    for (const auto& term : u.terms())
      v += term.omega * (-term.p * std::sin(term.omega * t) + term.q * std::cos(term.omega * t));
    return v;
  };
  const std::size_t n =
      std::min<std::size_t>(2'000'000, 64 + static_cast<std::size_t>(64 * wmax * T / (2 * kPi)));
  std::vector<double> nodes{0.0};
  double prev_t = 0, prev_d = du(0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(n);
    const double d = du(t);
    if ((prev_d <= 0 && d > 0) || (prev_d >= 0 && d < 0)) {
      double a = prev_t, c = t;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + c);
        ((du(a) <= 0) == (du(mid) <= 0) ? a : c) = mid;
      }
      nodes.push_back(0.5 * (a + c));
    }
    prev_t = t;
    prev_d = d;
  }
  nodes.push_back(T);
  Budget b;
  double prev = u(nodes.front());
  b.linf = std::fabs(prev);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double cur = u(nodes[i]);
    b.bv += std::fabs(cur - prev);
    b.linf = std::max(b.linf, std::fabs(cur));
    prev = cur;
  }
  b.t_linf = T * b.linf;
  return b;
}

}  // namespace

Budget budget_report(const ControlSignal& u) {
  if (u.is_piecewise()) return piecewise_budget(u);
  if (u.terms().empty()) {
    Budget b;
    b.linf = std::fabs(u.offset());
    b.t_linf = u.horizon() * b.linf;
    return b;
  }
  if (u.terms().size() == 1 && u.offset() == 0.0) return single_harmonic_budget(u);
  return scanned_trig_budget(u);
}

// ---- moment problems ----

namespace {

using CLD = std::complex<long double>;

// integral of e^{i w tau} over [a, b]
CLD cexp_integral(long double w, long double a, long double b) {
  if (w == 0) return {b - a, 0.0L};
  const CLD iw(0.0L, w);
  return (std::exp(iw * b) - std::exp(iw * a)) / iw;
}

// m(u, w) = -i * integral of u(tau) e^{i w tau} over [0, T], exact per form
CLD moment_value(const ControlSignal& u, long double w) {
  CLD total(0, 0);
  if (u.is_piecewise()) {
    const auto& bp = u.breakpoints();
    const auto& v = u.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      total += static_cast<long double>(v[i]) * cexp_integral(w, bp[i], bp[i + 1]);
  } else {
    const long double T = u.horizon();
    total += static_cast<long double>(u.offset()) * cexp_integral(w, 0, T);
    for (const auto& term : u.terms()) {
      const CLD plus = cexp_integral(w + term.omega, 0, T);
      const CLD minus = cexp_integral(w - term.omega, 0, T);
      total += static_cast<long double>(term.p) / 2 * (plus + minus);
      total += CLD(0, -static_cast<long double>(term.q) / 2) * (plus - minus);
    }
  }
  return CLD(0, -1) * total;
}

void validate_moment_problem(const MomentProblem& mp) {
  if (mp.omega.empty() || mp.omega.size() != mp.r.size())
    throw Error("moment problem needs matching frequency and target lists");
  if (!(mp.T > 0)) throw Error("moment problem horizon must be positive");
  for (std::size_t i = 1; i < mp.omega.size(); ++i)
    if (!(mp.omega[i] > mp.omega[i - 1]))
      throw Error("moment frequencies must be strictly increasing");
}

}  // namespace

MomentProblem MomentProblem::from_targets(const std::vector<double>& mu, const Eigen::VectorXcd& x,
                                          const Eigen::VectorXcd& Bcol1, double T,
                                          bool reality_k1) {
  const std::size_t N = mu.size();
  if (N == 0 || static_cast<std::size_t>(x.size()) != N ||
      static_cast<std::size_t>(Bcol1.size()) != N)
    throw Error("moment targets, couplings, and spectrum must have equal lengths");
  MomentProblem mp;
  mp.T = T;
  mp.reality_k1 = reality_k1;
  for (std::size_t k = 0; k < N; ++k) {
    const double bk = std::abs(Bcol1(static_cast<Eigen::Index>(k)));
    if (!(bk > 0)) {
      std::ostringstream os;
      os << "first-column coupling vanishes at mode " << k + 1
         << "; the moment targets are unreachable through the linearization";
      throw Error(os.str());
    }
    mp.omega.push_back(mu[k] - mu[0]);
    mp.r.push_back(x(static_cast<Eigen::Index>(k)) / Bcol1(static_cast<Eigen::Index>(k)));
  }
  if (reality_k1) {
    const double scale = x.cwiseAbs().maxCoeff() + 1;
    if (std::fabs(x(0).real()) > 1e-12 * scale)
      throw Error("the first moment target must be purely imaginary (i*x_1 real)");
  }
  validate_moment_problem(mp);
  return mp;
}

int moment_sample_floor(const MomentProblem& mp) {
  double wmax = 0;
  for (double w : mp.omega) wmax = std::max(wmax, std::fabs(w));
  const double needed = 4.0 * static_cast<double>(mp.omega.size()) * wmax * mp.T / (2 * kPi);
  return std::max<int>(static_cast<int>(mp.omega.size()),
                       std::max(1, static_cast<int>(std::ceil(needed))));
}

MomentSolution solve_moment_problem(const MomentProblem& mp, int n_samples,
                                    std::optional<double> ridge) {
  validate_moment_problem(mp);
  const int floor_n = moment_sample_floor(mp);
  if (n_samples < floor_n) {
    std::ostringstream os;
    os << "n_samples = " << n_samples << " is below the resolution floor " << floor_n;
    throw Error(os.str());
  }
  if (ridge && *ridge < 0) throw Error("ridge parameter must be nonnegative");

  const int N = static_cast<int>(mp.omega.size());
  std::vector<double> breaks(static_cast<std::size_t>(n_samples) + 1);
  for (int i = 0; i <= n_samples; ++i)
    breaks[static_cast<std::size_t>(i)] = mp.T * static_cast<double>(i) / n_samples;

  int rows = 0;
  for (double w : mp.omega) rows += w == 0 ? 1 : 2;
  Eigen::MatrixXd A(rows, n_samples);
  Eigen::VectorXd b(rows);
  int row = 0;
  for (int k = 0; k < N; ++k) {
    const long double w = mp.omega[static_cast<std::size_t>(k)];
    const std::complex<double> ir = std::complex<double>(0, 1) * mp.r[static_cast<std::size_t>(k)];
    for (int i = 0; i < n_samples; ++i) {
      const CLD E = cexp_integral(w, breaks[static_cast<std::size_t>(i)],
                                  breaks[static_cast<std::size_t>(i) + 1]);
      A(row, i) = static_cast<double>(E.real());
      if (w != 0) A(row + 1, i) = static_cast<double>(E.imag());
    }
    b(row) = ir.real();
    if (w != 0) b(row + 1) = ir.imag();
    row += w == 0 ? 1 : 2;
  }

  const Eigen::MatrixXd G = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw Error("moment system decomposition failed");
  const double ev_max = es.eigenvalues().maxCoeff();
  const double ev_min = std::max(es.eigenvalues().minCoeff(), 0.0);
  const double lambda = ridge ? *ridge : 1e-10 * ev_max;

  MomentSolution sol;
  sol.lambda = lambda;
  sol.cond = (ev_max + lambda) / std::max(ev_min + lambda, std::numeric_limits<double>::min());
  if (sol.cond > 1e14) {
    std::ostringstream os;
    os << "moment system is ill-conditioned (cond = " << sol.cond << "); raise T, lower N, or add ridge";
    throw Error(os.str());
  }
  const Eigen::VectorXd y =
      es.eigenvectors() *
      ((es.eigenvectors().transpose() * b).array() / (es.eigenvalues().array() + lambda)).matrix();
  const Eigen::VectorXd uvec = A.transpose() * y;

  sol.u = ControlSignal::piecewise(breaks, std::vector<double>(uvec.data(), uvec.data() + n_samples));
  for (int k = 0; k < N; ++k) {
    const CLD m = moment_value(sol.u, mp.omega[static_cast<std::size_t>(k)]);
    const std::complex<double> diff(static_cast<double>(m.real()) - mp.r[static_cast<std::size_t>(k)].real(),
                                    static_cast<double>(m.imag()) - mp.r[static_cast<std::size_t>(k)].imag());
    sol.residuals.push_back(std::abs(diff));
    sol.max_residual = std::max(sol.max_residual, sol.residuals.back());
  }
  return sol;
}

double verify_moments(const ControlSignal& u, const MomentProblem& mp) {
  validate_moment_problem(mp);
  double worst = 0;
  for (std::size_t k = 0; k < mp.omega.size(); ++k) {
    const CLD m = moment_value(u, mp.omega[k]);
    const std::complex<double> diff(static_cast<double>(m.real()) - mp.r[k].real(),
                                    static_cast<double>(m.imag()) - mp.r[k].imag());
    worst = std::max(worst, std::abs(diff));
  }
  return worst;
}

// ---- planar generators ----

GeneratorSet admissible_generators(const CouplingMatrix& Bmat, const std::vector<double>& mu,
                                   int N, double tol) {
  N = std::min<int>({N, static_cast<int>(Bmat.M.rows()), static_cast<int>(mu.size())});
  if (tol < 0) throw Error("coupling tolerance must be nonnegative");
  std::vector<double> head(mu.begin(), mu.begin() + N);
  const double ftol = default_resonance_tol(head);

  struct Pair {
    int j, k;
    double freq;
  };
  std::vector<Pair> coupled;
  for (int j = 1; j <= N; ++j)
    for (int k = j + 1; k <= N; ++k)
      if (std::abs(Bmat.M(j - 1, k - 1)) > tol)
        coupled.push_back({j, k, std::fabs(mu[static_cast<std::size_t>(k - 1)] -
                                           mu[static_cast<std::size_t>(j - 1)])});

  GeneratorSet gens;
  gens.N = N;
  for (const auto& p : coupled) {
    bool unique = true;
    for (const auto& q : coupled)
      if ((q.j != p.j || q.k != p.k) && std::fabs(q.freq - p.freq) <= ftol) unique = false;
    if (unique) gens.pairs.emplace_back(p.j, p.k);
  }
  return gens;
}

Eigen::MatrixXcd planar_generator(int N, int j, int k, double theta) {
  if (j < 1 || k < 1 || j > N || k > N || j == k)
    throw Error("planar generator needs distinct indices within the truncation");
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, N);
  E(j - 1, k - 1) = std::polar(1.0, theta);
  E(k - 1, j - 1) = -std::polar(1.0, -theta);
  return E;
}

int lie_closure_rank(const GeneratorSet& gens, int N) {
  if (N < 2) throw Error("Lie closure needs N >= 2");
  const int cap = N * N - 1;
  std::vector<Eigen::MatrixXcd> basis;
  const auto ip = [](const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
    return (X.adjoint() * Y).trace().real();
  };
  const auto add = [&](Eigen::MatrixXcd X) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& bvec : basis) X -= ip(bvec, X) * bvec;
    const double nrm = std::sqrt(std::max(ip(X, X), 0.0));
    if (nrm < 1e-9) return false;
    basis.push_back(X / nrm);
    return true;
  };

  for (const auto& [j, k] : gens.pairs) {
    add(planar_generator(N, j, k, 0.0));
    add(planar_generator(N, j, k, kPi / 2));
  }
  std::size_t processed = 0;
  while (processed < basis.size() && static_cast<int>(basis.size()) < cap) {
    const Eigen::MatrixXcd X = basis[processed];
    for (std::size_t i = 0; i <= processed && static_cast<int>(basis.size()) < cap; ++i)
      add(X * basis[i] - basis[i] * X);
    ++processed;
  }
  return static_cast<int>(basis.size());
}

// ---- rotation plans ----

namespace {

Eigen::MatrixXcd planar_rotation(int N, const RotationFactor& f) {
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(N, N);
  const double c = std::cos(f.alpha), s = std::sin(f.alpha);
  G(f.j - 1, f.j - 1) = c;
  G(f.k - 1, f.k - 1) = c;
  G(f.j - 1, f.k - 1) = std::polar(s, f.theta);
  G(f.k - 1, f.j - 1) = -std::polar(s, -f.theta);
  return G;
}

}  // namespace

RotationPlan plan_rotations(const Eigen::MatrixXcd& target) {
  const int N = static_cast<int>(target.rows());
  if (N < 1 || target.cols() != N) throw Error("rotation target must be square");
  const double unitary_defect =
      (target.adjoint() * target - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff();
  const double det_defect = std::abs(target.determinant() - std::complex<double>(1, 0));
  if (unitary_defect > 1e-10 || det_defect > 1e-10) {
    std::ostringstream os;
    os << "rotation target is not special-unitary (unitarity defect " << unitary_defect
       << ", det defect " << det_defect << ")";
    throw Error(os.str());
  }

  Eigen::MatrixXcd U = target;
  RotationPlan plan;
  for (int c = 0; c < N - 1; ++c) {
    for (int r = N - 1; r > c; --r) {
      const std::complex<double> a = U(c, c), bv = U(r, c);
      if (std::abs(bv) < 1e-15) {
        U(r, c) = 0;
        continue;
      }
      const double alpha = std::atan2(std::abs(bv), std::abs(a));
      const double theta = std::arg(a) - std::arg(bv);
      // eliminate U(r,c) with exp(alpha E^theta) acting on rows (c, r)
      const double cs = std::cos(alpha), sn = std::sin(alpha);
      const std::complex<double> ph = std::polar(1.0, theta);
      for (int col = 0; col < N; ++col) {
        const std::complex<double> uc = U(c, col), ur = U(r, col);
        U(c, col) = cs * uc + ph * sn * ur;
        U(r, col) = -std::conj(ph) * sn * uc + cs * ur;
      }
      plan.factors.push_back({c + 1, r + 1, std::remainder(theta + kPi, 2 * kPi), alpha});
    }
  }
  plan.diagonal = U.diagonal();
  return plan;
}

Eigen::MatrixXcd reconstruct_rotations(const RotationPlan& plan, int N) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N, N);
  for (const auto& f : plan.factors) M *= planar_rotation(N, f);
  if (plan.diagonal.size() != N) throw Error("rotation plan diagonal has the wrong size");
  return M * plan.diagonal.asDiagonal();
}

Eigen::MatrixXcd haar_special_unitary(int N, std::mt19937_64& rng) {
  if (N < 1) throw Error("haar_special_unitary needs N >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) G(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix the QR gauge so Q is Haar, then strip the global phase to land in SU(N)
  for (int j = 0; j < N; ++j) {
    std::complex<double> d = R(j, j);
    Q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : 1.0;
  }
  std::complex<double> det = Q.determinant();
  return Q * std::polar(1.0, -std::arg(det) / N);
}

std::optional<double> match_drift_phase(const Eigen::VectorXcd& diagonal,
                                        const std::vector<double>& mu, double t_max, double tol) {
  const int N = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(diagonal.size()),
                                                       mu.size()));
  if (N == 0 || !(t_max > 0)) return std::nullopt;
  double mu_max = 1e-12;
  for (int k = 0; k < N; ++k) mu_max = std::max(mu_max, std::fabs(mu[static_cast<std::size_t>(k)]));

  const auto objective = [&](double t) {
    double worst = 0;
    for (int k = 0; k < N; ++k)
      worst = std::max(worst, std::abs(std::polar(1.0, -mu[static_cast<std::size_t>(k)] * t) -
                                       diagonal(k)));
    return worst;
  };

  const double step = 0.25 / mu_max;
  const std::size_t n = std::min<std::size_t>(20'000'000, static_cast<std::size_t>(t_max / step) + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(n);
    if (objective(t) > 0.3) continue;
    double a = std::max(0.0, t - t_max / static_cast<double>(n));
    double b = std::min(t_max, t + t_max / static_cast<double>(n));
    for (int it = 0; it < 200 && b - a > 1e-18 * (1 + t); ++it) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (objective(m1) <= objective(m2))
        b = m2;
      else
        a = m1;
    }
    const double t_best = 0.5 * (a + b);
    if (objective(t_best) <= tol) return t_best;
  }
  return std::nullopt;
}

// ---- resonant pulses ----

ControlSignal resonant_pulse(int j, int k, double theta_phase, double alpha, double A,
                             std::complex<double> Bjk, double omega_jk) {
  if (j == k) throw Error("resonant pulse needs two distinct modes");
  if (omega_jk == 0) throw Error("resonant pulse needs a nonzero transition frequency");
  if (!(std::abs(Bjk) > 0)) throw Error("resonant pulse needs a nonzero coupling");
  if (!(A > 0)) throw Error("pulse amplitude must be positive");
  if (alpha < 0) {
    alpha = -alpha;
    theta_phase += kPi;
  }
  if (alpha == 0) return ControlSignal::zero(0.0);

  const double T = alpha / (A * std::abs(Bjk));
  const double phase = omega_jk > 0 ? std::arg(Bjk) - theta_phase - kPi / 2
                                    : theta_phase - std::arg(Bjk) + kPi / 2;
  const double w = std::fabs(omega_jk);
  // 2A cos(w t + phase) = 2A cos(phase) cos(w t) - 2A sin(phase) sin(w t)
  return ControlSignal::trig(T, 0.0,
                             {{w, 2 * A * std::cos(phase), -2 * A * std::sin(phase)}});
}

}  // namespace qgc
