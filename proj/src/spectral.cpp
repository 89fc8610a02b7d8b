#include "qgc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgc/core.hpp"

namespace qgc {

// ---- gap checks ----

namespace {

void require_increasing(const std::vector<double>& mu) {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (!(mu[i] > mu[i - 1]))
      throw Error("eigenvalue sequence must be strictly increasing");
}

double max_abs(const std::vector<double>& mu) {
  double m = 0;
  for (double v : mu) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

GapPolynomialReport check_gap_polynomial(const std::vector<double>& mu, double d_tilde) {
  if (mu.size() < 2) throw Error("gap check needs at least two eigenvalues");
  if (d_tilde < 1) throw Error("gap exponent must be >= 1");
  require_increasing(mu);
  GapPolynomialReport rep;
  rep.d_tilde = d_tilde;
  rep.c_best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < mu.size(); ++k) {
    const double v =
        (mu[k] - mu[k - 1]) * static_cast<double>(std::pow(static_cast<long double>(k), d_tilde + 1));
    if (v < rep.c_best) {
      rep.c_best = v;
      rep.k_at = static_cast<int>(k);
    }
  }
  rep.pass = rep.c_best > 0;
  return rep;
}

GapReport check_gap_uniform(const std::vector<double>& mu, double delta) {
  if (mu.size() < 2) throw Error("gap check needs at least two eigenvalues");
  if (!(delta > 0)) throw Error("gap threshold delta must be positive");
  require_increasing(mu);
  const int N = static_cast<int>(mu.size());
  for (int M = 1; M < N; ++M) {
    GapReport rep;
    rep.M = M;
    rep.delta = delta;
    rep.margins.reserve(static_cast<std::size_t>(N - M));
    bool ok = true;
    for (int k = 0; k + M < N; ++k) {
      const double margin = mu[static_cast<std::size_t>(k + M)] - mu[static_cast<std::size_t>(k)] -
                            delta * M;
      rep.margins.push_back(margin);
      ok = ok && margin > 0;
    }
    if (ok) {
      rep.pass = true;
      return rep;
    }
  }
  std::ostringstream os;
  os << "no block size M <= " << N - 1 << " satisfies the uniform gap for delta = " << delta;
  throw Error(os.str());
}

int ClassPartition::class_of(int k) const {
  for (std::size_t m = 0; m < classes.size(); ++m)
    for (int idx : classes[m])
      if (idx == k) return static_cast<int>(m) + 1;
  throw Error("index is not covered by the partition");
}

ClassPartition partition_classes(const std::vector<double>& mu, double delta, int M) {
  if (mu.empty()) throw Error("cannot partition an empty spectrum");
  if (!(delta > 0) || M < 1) throw Error("partition needs delta > 0 and M >= 1");
  require_increasing(mu);
  ClassPartition part;
  part.classes.push_back({1});
  for (std::size_t i = 1; i < mu.size(); ++i) {
    if (mu[i] - mu[i - 1] < delta)
      part.classes.back().push_back(static_cast<int>(i) + 1);
    else
      part.classes.push_back({static_cast<int>(i) + 1});
  }
  const std::size_t limit = M == 1 ? 1 : static_cast<std::size_t>(M - 1);
  for (const auto& cls : part.classes)
    if (cls.size() > limit) {
      std::ostringstream os;
      os << "class of size " << cls.size() << " is inconsistent with M = " << M;
      throw Error(os.str());
    }
  return part;
}

// ---- resonances ----

double default_resonance_tol(const std::vector<double>& mu) { return 1e-9 * max_abs(mu); }

namespace {

ResonanceEntry make_entry(int j1, int k1, int j2, int k2, double mismatch, double exact_scale) {
  ResonanceEntry e;
  if (std::pair{j1, k1} <= std::pair{j2, k2}) {
    e.j = j1; e.k = k1; e.l = j2; e.m = k2;
  } else {
    e.j = j2; e.k = k2; e.l = j1; e.m = k1;
  }
  e.mismatch = mismatch;
  e.exact = mismatch <= exact_scale;
  return e;
}

bool entry_less(const ResonanceEntry& a, const ResonanceEntry& b) {
  return std::tie(a.j, a.k, a.l, a.m) < std::tie(b.j, b.k, b.l, b.m);
}

double exact_scale_for(const std::vector<double>& mu) {
  return 64 * std::numeric_limits<double>::epsilon() * max_abs(mu);
}

}  // namespace

ResonanceTable find_resonances(const std::vector<double>& mu, int N, double tol) {
  if (!(tol > 0)) throw Error("resonance tolerance must be positive");
  N = std::min<int>(N, static_cast<int>(mu.size()));
  ResonanceTable table;
  table.tol = tol;
  if (N < 2) return table;

  struct Diff {
    double v;
    int j, k;
  };
  std::vector<Diff> diffs;
  diffs.reserve(static_cast<std::size_t>(N) * (N - 1) / 2);
  for (int j = 2; j <= N; ++j)
    for (int k = 1; k < j; ++k)
      diffs.push_back({mu[static_cast<std::size_t>(j - 1)] - mu[static_cast<std::size_t>(k - 1)],
                       j, k});
  std::sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.v < b.v; });

  const double exact_scale = exact_scale_for(mu);
  for (std::size_t i = 0; i < diffs.size(); ++i)
    for (std::size_t n = i + 1; n < diffs.size() && diffs[n].v - diffs[i].v <= tol; ++n)
      table.entries.push_back(make_entry(diffs[i].j, diffs[i].k, diffs[n].j, diffs[n].k,
                                         diffs[n].v - diffs[i].v, exact_scale));
  std::sort(table.entries.begin(), table.entries.end(), entry_less);
  return table;
}

ResonanceTable find_resonances_bruteforce(const std::vector<double>& mu, int N, double tol) {
  if (!(tol > 0)) throw Error("resonance tolerance must be positive");
  N = std::min<int>(N, static_cast<int>(mu.size()));
  ResonanceTable table;
  table.tol = tol;
  const double exact_scale = exact_scale_for(mu);
  for (int j = 2; j <= N; ++j)
    for (int k = 1; k < j; ++k)
      for (int l = 2; l <= N; ++l)
        for (int m = 1; m < l; ++m) {
          if (std::pair{j, k} >= std::pair{l, m}) continue;
          const double d1 = mu[static_cast<std::size_t>(j - 1)] - mu[static_cast<std::size_t>(k - 1)];
          const double d2 = mu[static_cast<std::size_t>(l - 1)] - mu[static_cast<std::size_t>(m - 1)];
          if (std::fabs(d1 - d2) <= tol)
            table.entries.push_back(make_entry(j, k, l, m, std::fabs(d1 - d2), exact_scale));
        }
  std::sort(table.entries.begin(), table.entries.end(), entry_less);
  return table;
}

bool square_difference_match(int j, int k, int l, int m) {
  const auto sq = [](int n) { return static_cast<long long>(n) * n; };
  return sq(j) - sq(k) == sq(l) - sq(m);
}

// ---- coupling decay and diagonal combinations ----

AssumptionIReport check_assumption_I(const CouplingMatrix& Bmat, const std::vector<double>& mu,
                                     double eta, double tol) {
  const int N = static_cast<int>(Bmat.M.rows());
  if (N < 1 || static_cast<int>(mu.size()) < N)
    throw Error("coupling matrix and spectrum sizes are inconsistent");
  AssumptionIReport rep;
  rep.c_best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= N; ++k) {
    const double v = std::abs(Bmat.M(k - 1, 0)) *
                     static_cast<double>(std::pow(static_cast<long double>(k), 2.0L + eta));
    rep.decay_values.push_back(v);
    if (v < rep.c_best) {
      rep.c_best = v;
      rep.k_at = k;
    }
  }
  rep.decay_pass = rep.c_best > 0;

  std::vector<double> head(mu.begin(), mu.begin() + N);
  rep.resonances = find_resonances(head, N, default_resonance_tol(head));
  for (auto& e : rep.resonances.entries) {
    e.diag_combo = std::real(Bmat.M(e.j - 1, e.j - 1) - Bmat.M(e.k - 1, e.k - 1) -
                             Bmat.M(e.l - 1, e.l - 1) + Bmat.M(e.m - 1, e.m - 1));
    if (std::fabs(e.diag_combo) <= tol) rep.violations.push_back(e);
  }
  rep.pass = rep.decay_pass && rep.violations.empty();
  return rep;
}

// ---- smoothness-preservation bookkeeping ----

const char* boundary_case_name(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::AllDirichlet: return "all-dirichlet";
    case BoundaryCase::AllNeumann: return "all-neumann";
    case BoundaryCase::MixedOrNone: return "mixed-or-none";
  }
  return "?";
}

AssumptionIIReport check_assumption_II(const SpectralBasis& basis, const ControlOperator& B,
                                       double eta, double a, int n_modes) {
  const MetricGraph& g = basis.graph();
  const auto support = basis.support_union();

  bool any_external = false, any_dirichlet = false, any_neumann = false;
  for (int e : support) {
    const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
    for (int vi : {edge.v_from, edge.v_to}) {
      if (vi < 0) continue;
      const Vertex& v = g.vertices()[static_cast<std::size_t>(vi)];
      if (!v.external()) continue;
      any_external = true;
      (v.bc == BoundaryKind::Dirichlet ? any_dirichlet : any_neumann) = true;
    }
  }

  AssumptionIIReport rep;
  double lo = 1, hi = 1.5;
  if (any_external && any_dirichlet && !any_neumann) {
    rep.bc_case = BoundaryCase::AllDirichlet;
    lo = 1; hi = 2.5;
  } else if (any_external && any_neumann && !any_dirichlet) {
    rep.bc_case = BoundaryCase::AllNeumann;
    lo = 2; hi = 3.5;
  } else {
    rep.bc_case = BoundaryCase::MixedOrNone;
  }
  rep.d_lo = std::max(a + eta, lo);
  rep.d_hi = hi;
  rep.range_empty = !(rep.d_lo < rep.d_hi);

  const int n = n_modes > 0 ? std::min(n_modes, basis.size()) : basis.size();
  rep.modes_checked = n;
  constexpr double kBoundaryTol = 1e-8;
  for (int k = 1; k <= n; ++k) {
    for (std::size_t vi = 0; vi < g.vertices().size(); ++vi) {
      const Vertex& v = g.vertices()[vi];
      double lo_val = std::numeric_limits<double>::infinity();
      double hi_val = -lo_val;
      double dsum = 0, max_val = 0;
      bool touched = false;
      for (std::size_t ei = 0; ei < g.edges().size(); ++ei) {
        const Edge& edge = g.edges()[ei];
        const int e = static_cast<int>(ei);
        if (edge.v_from == static_cast<int>(vi)) {
          const double val = control_image_value(B, basis, k, e, 0.0);
          lo_val = std::min(lo_val, val);
          hi_val = std::max(hi_val, val);
          max_val = std::max(max_val, std::fabs(val));
          dsum += control_image_derivative(B, basis, k, e, 0.0);
          touched = true;
        }
        if (edge.v_to == static_cast<int>(vi)) {
          const double val = control_image_value(B, basis, k, e, edge.length);
          lo_val = std::min(lo_val, val);
          hi_val = std::max(hi_val, val);
          max_val = std::max(max_val, std::fabs(val));
          dsum -= control_image_derivative(B, basis, k, e, edge.length);
          touched = true;
        }
      }
      if (!touched) continue;
      double value_residual = 0, kirchhoff_residual = 0;
      switch (v.bc) {
        case BoundaryKind::Dirichlet: value_residual = max_val; break;
        case BoundaryKind::Neumann: kirchhoff_residual = std::fabs(dsum); break;
        case BoundaryKind::NeumannKirchhoff:
          value_residual = hi_val - lo_val;
          kirchhoff_residual = std::fabs(dsum);
          break;
      }
      rep.max_value_residual = std::max(rep.max_value_residual, value_residual);
      rep.max_kirchhoff_residual = std::max(rep.max_kirchhoff_residual, kirchhoff_residual);
      if (value_residual > kBoundaryTol || kirchhoff_residual > kBoundaryTol) {
        std::ostringstream os;
        os << "boundary identity violated at vertex '" << v.id << "' for mode " << k
           << " (value residual " << value_residual << ", derivative residual "
           << kirchhoff_residual << ")";
        throw Error(os.str());
      }
    }
  }
  return rep;
}

// ---- perturbed spectra ----

PerturbedSpectrum perturbed_spectrum(const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat,
                                     double u0, int N) {
  if (N < 2) throw Error("perturbed spectrum needs N >= 2");
  if (Adiag.size() < N || Bmat.rows() < N || Bmat.cols() < N)
    throw Error("perturbed spectrum inputs are smaller than the truncation");
  // extended precision: the interesting signal (slope - B_kk ~ u0) sits near
  // the double-precision noise floor eps * |mu_N| / u0 of a plain eigensolve
  using MatrixXlcd = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixXlcd H = static_cast<long double>(u0) * Bmat.topLeftCorner(N, N).cast<std::complex<long double>>();
  for (int k = 0; k < N; ++k) H(k, k) += static_cast<long double>(Adiag(k));
  Eigen::SelfAdjointEigenSolver<MatrixXlcd> es(H);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");

  PerturbedSpectrum ps;
  ps.u0 = u0;
  ps.mu = es.eigenvalues().cast<double>();
  ps.vectors = es.eigenvectors().cast<std::complex<double>>();
  for (int c = 0; c < N; ++c) {
    int at = 0;
    double best = 0;
    for (int r = 0; r < N; ++r) {
      const double m = std::abs(ps.vectors(r, c));
      if (m > best) {
        best = m;
        at = r;
      }
    }
    if (best > 0) ps.vectors.col(c) *= std::conj(ps.vectors(at, c)) / best;
  }
  return ps;
}

NondegeneracyReport scan_nondegeneracy(const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat,
                                       const std::vector<double>& u0_grid, int N, double tol) {
  std::vector<double> mu(Adiag.data(), Adiag.data() + std::min<int>(N, static_cast<int>(Adiag.size())));
  ResonanceTable table = find_resonances(mu, N, default_resonance_tol(mu));
  std::vector<ResonanceEntry> quads;
  for (const auto& e : table.entries)
    if (e.exact) quads.push_back(e);

  NondegeneracyReport rep;
  rep.n_quadruples = static_cast<int>(quads.size());
  rep.tol = tol;
  rep.pass = true;
  for (double u0 : u0_grid) {
    const PerturbedSpectrum ps = perturbed_spectrum(Adiag, Bmat, u0, N);
    NondegeneracyRow row;
    row.u0 = u0;
    row.min_quadruple = std::numeric_limits<double>::infinity();
    for (const auto& q : quads) {
      const double combo = ps.mu(q.j - 1) - ps.mu(q.k - 1) - ps.mu(q.l - 1) + ps.mu(q.m - 1);
      row.min_quadruple = std::min(row.min_quadruple, std::fabs(combo));
    }
    const Eigen::VectorXcd col =
        (ps.vectors.adjoint() * Bmat.topLeftCorner(N, N) * ps.vectors).col(0);
    row.min_coupling = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
      const double m = std::abs(col(k));
      if (m < row.min_coupling) {
        row.min_coupling = m;
        row.coupling_k = k + 1;
      }
    }
    row.pass = row.min_quadruple > tol && row.min_coupling > tol;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace qgc
