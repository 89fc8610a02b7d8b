#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "qgc/basis.hpp"
#include "qgc/core.hpp"
#include "qgc/graph.hpp"
#include "qgc/operator.hpp"
#include "qgc/spectral.hpp"

using namespace qgc;

namespace {

std::vector<double> loop_eigenvalues(int N) {
  std::vector<double> mu;
  for (int k = 1; k <= N; ++k) mu.push_back(4.0 * k * k * kPi * kPi);
  return mu;
}

std::set<std::tuple<int, int, int, int>> quadruple_set(const ResonanceTable& t) {
  std::set<std::tuple<int, int, int, int>> s;
  for (const auto& e : t.entries) s.insert({e.j, e.k, e.l, e.m});
  return s;
}

}  // namespace

// ---- polynomial gap lower bounds ----

TEST_CASE("the polynomial gap constant is exact on worked spectra") {
  std::vector<double> linear;
  for (int k = 1; k <= 50; ++k) linear.push_back(k);
  const GapPolynomialReport lin = check_gap_polynomial(linear, 1.0);
  CHECK(lin.pass);
  CHECK(lin.c_best == doctest::Approx(1.0).epsilon(1e-12));  // unit gaps, k_at = 1

  const GapPolynomialReport loop = check_gap_polynomial(loop_eigenvalues(200), 1.0);
  CHECK(loop.pass);
  CHECK(loop.k_at == 1);
  CHECK(loop.c_best == doctest::Approx(12 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("non-increasing spectra are rejected by the gap check") {
  CHECK_THROWS_AS((void)check_gap_polynomial({1.0, 1.0, 2.0}, 1.0), Error);
  CHECK_THROWS_AS((void)check_gap_polynomial({2.0, 1.0}, 1.0), Error);
}

// ---- uniform M-gap ----

TEST_CASE("the uniform gap check finds the smallest viable M") {
  const GapReport loop = check_gap_uniform(loop_eigenvalues(100), 12 * kPi * kPi - 1);
  CHECK(loop.pass);
  CHECK(loop.M == 1);
  CHECK(loop.delta == doctest::Approx(12 * kPi * kPi - 1));
  for (double m : loop.margins) CHECK(m > 0);

  std::vector<double> squares;
  for (int k = 1; k <= 60; ++k) squares.push_back(static_cast<double>(k) * k);
  const GapReport sq = check_gap_uniform(squares, 2.0);
  CHECK(sq.pass);
  CHECK(sq.M == 1);  // adjacent gaps 2k+1 > 2 already

  // arithmetic spectrum mu_k = k and delta = 1: mu_{k+M} - mu_k = M, never > delta*M
  std::vector<double> arith;
  for (int k = 1; k <= 40; ++k) arith.push_back(k);
  CHECK_THROWS_AS((void)check_gap_uniform(arith, 1.0), Error);
}

TEST_CASE("clustered spectra need a larger M") {
  // pairs {10m, 10m + 0.5}: adjacent in-pair gaps 0.5 fail delta = 1 at M = 1,
  // but two steps always clear 2
  std::vector<double> mu;
  for (int m = 1; m <= 12; ++m) {
    mu.push_back(10.0 * m);
    mu.push_back(10.0 * m + 0.5);
  }
  const GapReport rep = check_gap_uniform(mu, 1.0);
  CHECK(rep.pass);
  CHECK(rep.M == 2);
}

// ---- eigenvalue class partitions ----

TEST_CASE("greedy partition groups near-degenerate neighbours") {
  const std::vector<double> mu = {1.0, 1.1, 5.0, 5.1, 9.0};
  const ClassPartition part = partition_classes(mu, 1.0, 3);
  REQUIRE(part.classes.size() == 3);
  CHECK(part.classes[0] == std::vector<int>{1, 2});
  CHECK(part.classes[1] == std::vector<int>{3, 4});
  CHECK(part.classes[2] == std::vector<int>{5});
  CHECK(part.class_of(1) == 1);
  CHECK(part.class_of(2) == 1);
  CHECK(part.class_of(4) == 2);
  CHECK(part.class_of(5) == 3);
}

TEST_CASE("partition classes split exactly where gaps exceed delta") {
  std::vector<double> mu;
  for (int m = 1; m <= 10; ++m) {
    mu.push_back(10.0 * m);
    mu.push_back(10.0 * m + 0.5);
  }
  const ClassPartition part = partition_classes(mu, 1.0, 3);
  REQUIRE(part.classes.size() == 10);
  for (const auto& cls : part.classes) CHECK(cls.size() == 2);
  // within-class gaps < delta, across-class gaps >= delta
  for (std::size_t i = 1; i < mu.size(); ++i) {
    const bool same = part.class_of(static_cast<int>(i)) == part.class_of(static_cast<int>(i) + 1);
    CHECK(same == (mu[i] - mu[i - 1] < 1.0));
  }
}

TEST_CASE("M = 1 forces singleton classes and oversize clusters are rejected") {
  const ClassPartition singles = partition_classes(loop_eigenvalues(10), 1.0, 1);
  CHECK(singles.classes.size() == 10);
  for (const auto& cls : singles.classes) CHECK(cls.size() == 1);

  // a chain of three closer than delta cannot fit classes of size <= M-1 = 2
  CHECK_THROWS_AS((void)partition_classes({1.0, 1.2, 1.4, 9.0}, 0.5, 3), Error);
  // ...and M = 1 with a sub-delta gap is just as impossible
  CHECK_THROWS_AS((void)partition_classes({1.0, 1.2, 9.0}, 0.5, 1), Error);
}

// ---- resonances ----

TEST_CASE("loop-spectrum resonances match the exact integer criterion") {
  const std::vector<double> mu = loop_eigenvalues(20);
  const ResonanceTable scan = find_resonances(mu, 20, default_resonance_tol(mu));

  std::set<std::tuple<int, int, int, int>> expect;
  for (int j = 2; j <= 20; ++j)
    for (int k = 1; k < j; ++k)
      for (int l = 2; l <= 20; ++l)
        for (int m = 1; m < l; ++m) {
          if (std::make_pair(j, k) >= std::make_pair(l, m)) continue;  // canonical order
          if (square_difference_match(j, k, l, m)) expect.insert({j, k, l, m});
        }
  CHECK(quadruple_set(scan) == expect);
  CHECK(scan.entries.size() == 55);

  // the classic collision 7^2-1^2 = 8^2-4^2 = 48 is in the table
  CHECK(expect.count({7, 1, 8, 4}) == 1);
  CHECK(square_difference_match(7, 1, 8, 4));
  CHECK_FALSE(square_difference_match(7, 1, 8, 3));
  for (const auto& e : scan.entries) {
    CHECK(e.exact);
    CHECK(e.j > e.k);
    CHECK(e.l > e.m);
    CHECK(std::make_pair(e.j, e.k) < std::make_pair(e.l, e.m));
  }
}

TEST_CASE("the sorted scan agrees with the quartic brute force") {
  const std::vector<double> loop = loop_eigenvalues(25);
  const double tol = default_resonance_tol(loop);
  CHECK(quadruple_set(find_resonances(loop, 25, tol)) ==
        quadruple_set(find_resonances_bruteforce(loop, 25, tol)));

  const SpectralBasis star = star_pair_basis({std::cbrt(2.0), std::cbrt(5.0)}, 13);
  const std::vector<double> smu = star.eigenvalues();
  const double stol = default_resonance_tol(smu);
  CHECK(quadruple_set(find_resonances(smu, 25, stol)) ==
        quadruple_set(find_resonances_bruteforce(smu, 25, stol)));
}

TEST_CASE("tiny truncations have no resonances") {
  const ResonanceTable t = find_resonances(loop_eigenvalues(2), 2, 1e-9);
  CHECK(t.entries.empty());
}

TEST_CASE("star spectra only resonate within a length class") {
  const SpectralBasis star = star_pair_basis({std::cbrt(2.0), std::cbrt(5.0)}, 30);
  const std::vector<double> mu = star.eigenvalues();
  const int N = std::min<int>(60, star.size());
  const ResonanceTable t = find_resonances(mu, N, 1e-6);
  CHECK_FALSE(t.entries.empty());
  for (const auto& e : t.entries) {
    const int cj = star.mode(e.j).length_class;
    CHECK(cj == star.mode(e.k).length_class);
    CHECK(cj == star.mode(e.l).length_class);
    CHECK(cj == star.mode(e.m).length_class);
  }
}

// ---- coupling decay + diagonal nondegeneracy ----

TEST_CASE("the loop operator clears the decay and nondegeneracy gate") {
  const SpectralBasis basis = tadpole_basis(20);
  const CouplingMatrix m = assemble_matrix(tadpole_control(basis.graph()), basis, 20);
  const AssumptionIReport rep = check_assumption_I(m, basis.eigenvalues(), 1.0, 1e-12);
  CHECK(rep.pass);
  CHECK(rep.decay_pass);
  CHECK(rep.violations.empty());
  CHECK(rep.k_at == 1);
  // k = 1 contributes |B_11| * 1 = 1/6 + 1/(8 pi^2)
  CHECK(rep.c_best == doctest::Approx(1.0 / 6.0 + 1.0 / (8 * kPi * kPi)).epsilon(1e-10));
  CHECK(rep.decay_values.size() == 20);
  CHECK(rep.resonances.entries.size() == 55);
  for (const auto& e : rep.resonances.entries) CHECK(std::fabs(e.diag_combo) > 1e-12);
}

TEST_CASE("an identity-like operator fails the nondegeneracy gate") {
  const SpectralBasis basis = tadpole_basis(12);
  CouplingMatrix ident;
  ident.M = Eigen::MatrixXcd::Identity(12, 12);
  const AssumptionIReport rep = check_assumption_I(ident, basis.eigenvalues(), 1.0, 1e-12);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.decay_pass);          // off-diagonal column is all zero
  CHECK_FALSE(rep.violations.empty());  // diagonal combos cancel identically
}

// ---- smoothness windows ----

TEST_CASE("admissible smoothness windows follow the boundary kinds") {
  const SpectralBasis loop = tadpole_basis(6);
  const ControlOperator lb = tadpole_control(loop.graph());
  const AssumptionIIReport lrep = check_assumption_II(loop, lb, 1.0, 0.0, 6);
  CHECK(lrep.bc_case == BoundaryCase::MixedOrNone);  // no Dirichlet/Neumann tips in support
  CHECK(lrep.d_lo == doctest::Approx(1.0));
  CHECK(lrep.d_hi == doctest::Approx(1.5));
  CHECK_FALSE(lrep.range_empty);
  CHECK(lrep.modes_checked == 6);
  CHECK(lrep.max_value_residual < 1e-10);
  CHECK(lrep.max_kirchhoff_residual < 1e-10);

  const std::vector<double> lengths = {std::cbrt(2.0), std::cbrt(5.0)};
  const SpectralBasis star = star_pair_basis(lengths, 5);
  const ControlOperator sb = star_control(star.graph(), lengths);
  const AssumptionIIReport srep = check_assumption_II(star, sb, 1.0, 1.0, 5);
  CHECK(srep.bc_case == BoundaryCase::AllDirichlet);
  CHECK(srep.d_lo == doctest::Approx(2.0));
  CHECK(srep.d_hi == doctest::Approx(2.5));
  CHECK_FALSE(srep.range_empty);

  const SpectralBasis chain = uniform_chain_basis(1.0, ChainClass::NeumannSymmetric, 5);
  std::vector<CouplingTerm> terms;
  const int e1 = chain.graph().edge_index("e1");
  const int e2 = chain.graph().edge_index("e2");
  terms.push_back({e1, e1, Profile::parse("cos(pi*x)"), 1.0, +1});
  terms.push_back({e2, e2, Profile::parse("cos(pi*x)"), 1.0, +1});
  const ControlOperator cb(chain.graph(), std::move(terms));
  const AssumptionIIReport crep = check_assumption_II(chain, cb, 1.0, 1.0, 5);
  CHECK(crep.bc_case == BoundaryCase::AllNeumann);
  CHECK(crep.d_lo == doctest::Approx(2.0));
  CHECK(crep.d_hi == doctest::Approx(3.5));
}

TEST_CASE("an empty window is reported, a broken boundary identity throws") {
  // a + eta = 2 pushes the lower end past the mixed-case ceiling 3/2
  const SpectralBasis loop = tadpole_basis(4);
  const ControlOperator lb = tadpole_control(loop.graph());
  const AssumptionIIReport rep = check_assumption_II(loop, lb, 1.0, 1.0, 4);
  CHECK(rep.range_empty);
  CHECK(rep.d_lo >= rep.d_hi);

  // profile x on a Neumann chain: B phi_k has a nonzero end derivative
  const SpectralBasis chain = uniform_chain_basis(1.0, ChainClass::NeumannSymmetric, 4);
  std::vector<CouplingTerm> terms;
  const int e1 = chain.graph().edge_index("e1");
  const int e2 = chain.graph().edge_index("e2");
  terms.push_back({e1, e1, Profile::parse("x"), 1.0, +1});
  terms.push_back({e2, e2, Profile::parse("x"), 1.0, +1});
  const ControlOperator bad(chain.graph(), std::move(terms));
  CHECK_THROWS_AS((void)check_assumption_II(chain, bad, 1.0, 1.0, 4), Error);
}

// ---- perturbed spectra ----

TEST_CASE("the perturbed spectrum reduces to the drift at u0 = 0") {
  const SpectralBasis basis = tadpole_basis(8);
  const CouplingMatrix m = assemble_matrix(tadpole_control(basis.graph()), basis, 8);
  Eigen::VectorXd A(8);
  for (int k = 0; k < 8; ++k) A(k) = basis.eigenvalues()[static_cast<std::size_t>(k)];

  const PerturbedSpectrum p0 = perturbed_spectrum(A, m.M, 0.0, 8);
  for (int k = 0; k < 8; ++k) CHECK(p0.mu(k) == doctest::Approx(A(k)).epsilon(1e-14));

  // first-order sensitivity: eigenvalues move by at most u0 * ||B||
  const double u0 = 1e-3;
  const PerturbedSpectrum p = perturbed_spectrum(A, m.M, u0, 8);
  const double bnorm = m.M.cwiseAbs().rowwise().sum().maxCoeff();
  for (int k = 0; k < 8; ++k) CHECK(std::fabs(p.mu(k) - A(k)) <= u0 * bnorm + 1e-12);

  // columns are unit, phase-fixed eigenvectors
  for (int k = 0; k < 8; ++k) CHECK(p.vectors.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue shifts scale linearly with the control offset") {
  const SpectralBasis basis = tadpole_basis(10);
  const CouplingMatrix m = assemble_matrix(tadpole_control(basis.graph()), basis, 10);
  Eigen::VectorXd A(10);
  for (int k = 0; k < 10; ++k) A(k) = basis.eigenvalues()[static_cast<std::size_t>(k)];

  // defect of the first-order slope halves when u0 halves (second-order term)
  auto max_defect = [&](double u0) {
    const PerturbedSpectrum p = perturbed_spectrum(A, m.M, u0, 10);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const double slope = (p.mu(k) - A(k)) / u0;
      worst = std::max(worst, std::fabs(slope - m.M(k, k).real()));
    }
    return worst;
  };
  const double d1 = max_defect(1e-3);
  const double d2 = max_defect(5e-4);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("the nondegeneracy scan passes off the resonant set and flags u0 = 0") {
  const SpectralBasis basis = tadpole_basis(12);
  const CouplingMatrix m = assemble_matrix(tadpole_control(basis.graph()), basis, 12);
  Eigen::VectorXd A(12);
  for (int k = 0; k < 12; ++k) A(k) = basis.eigenvalues()[static_cast<std::size_t>(k)];

  const NondegeneracyReport rep =
      scan_nondegeneracy(A, m.M, {1e-3, 5e-4, 2.5e-4}, 12, 1e-8);
  CHECK(rep.pass);
  CHECK(rep.n_quadruples == 11);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.pass);
    CHECK(row.min_quadruple > 1e-8);
    CHECK(row.min_coupling > 1e-8);
    CHECK(row.coupling_k >= 1);
  }

  // u0 = 0 keeps the exact resonances: the row must fail
  const NondegeneracyReport zero = scan_nondegeneracy(A, m.M, {0.0}, 12, 1e-8);
  CHECK_FALSE(zero.pass);
  REQUIRE(zero.rows.size() == 1);
  CHECK_FALSE(zero.rows[0].pass);
  CHECK(zero.rows[0].min_quadruple <= 1e-8);
}
