#pragma once

// Spectral-side checks: gap conditions, eigenvalue-difference resonances,
// coupling decay and diagonal nondegeneracy, admissible smoothness ranges for
// the control operator, and perturbed-spectrum scans. Everything here is a
// finite-truncation report: it measures margins, it does not prove limits.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "qgc/basis.hpp"
#include "qgc/operator.hpp"

namespace qgc {

// ---- spectral gaps ----

struct GapPolynomialReport {
  double c_best = 0;   // min_k (mu_{k+1} - mu_k) * k^(d+1)
  int k_at = 0;        // 1-based index attaining the minimum
  double d_tilde = 0;
  bool pass = false;   // c_best > 0
};

GapPolynomialReport check_gap_polynomial(const std::vector<double>& mu, double d_tilde);

struct GapReport {
  int M = 0;
  double delta = 0;
  std::vector<double> margins;  // mu_{k+M} - mu_k - delta*M, k = 1..N-M
  bool pass = false;
};

// Smallest M with inf_k (mu_{k+M} - mu_k) > delta*M; throws if none fits the
// available range.
GapReport check_gap_uniform(const std::vector<double>& mu, double delta);

struct ClassPartition {
  std::vector<std::vector<int>> classes;  // 1-based indices, in order
  int class_of(int k) const;              // 1-based mode index -> class number (1-based)
};

// Greedy chaining: consecutive eigenvalues join a class while their gap is
// below delta. Class sizes must stay <= M-1 for M > 1 (singletons for M = 1).
ClassPartition partition_classes(const std::vector<double>& mu, double delta, int M);

// ---- eigenvalue-difference resonances ----

struct ResonanceEntry {
  int j = 0, k = 0, l = 0, m = 0;  // mu_j - mu_k matches mu_l - mu_m; j>k, l>m
  double mismatch = 0;             // |(mu_j - mu_k) - (mu_l - mu_m)|
  bool exact = false;              // mismatch at rounding scale, not a near-miss
  double diag_combo = 0;           // B_jj - B_kk - B_ll + B_mm (filled by checks)
};

struct ResonanceTable {
  std::vector<ResonanceEntry> entries;
  double tol = 0;
};

double default_resonance_tol(const std::vector<double>& mu);  // 1e-9 * max|mu|

// Sorted-difference scan over all ordered pairs j > k, O(N^2 log N).
ResonanceTable find_resonances(const std::vector<double>& mu, int N, double tol);

// O(N^4) reference implementation with the same canonical ordering.
ResonanceTable find_resonances_bruteforce(const std::vector<double>& mu, int N, double tol);

// Exact integer test for quadratic spectra mu_k ~ k^2 (loop graph).
bool square_difference_match(int j, int k, int l, int m);

// ---- coupling decay and diagonal nondegeneracy ----

struct AssumptionIReport {
  double c_best = 0;                  // min_k |B_k1| * k^(2+eta)
  int k_at = 0;
  bool decay_pass = false;
  std::vector<double> decay_values;   // |B_k1| * k^(2+eta), k = 1..N
  ResonanceTable resonances;          // with diag_combo filled in
  std::vector<ResonanceEntry> violations;  // |diag combo| <= tol
  bool pass = false;
};

AssumptionIReport check_assumption_I(const CouplingMatrix& Bmat, const std::vector<double>& mu,
                                     double eta, double tol);

// ---- smoothness-preservation bookkeeping ----

enum class BoundaryCase { AllDirichlet, AllNeumann, MixedOrNone };

const char* boundary_case_name(BoundaryCase c);

struct AssumptionIIReport {
  BoundaryCase bc_case = BoundaryCase::MixedOrNone;
  double d_lo = 0, d_hi = 0;   // admissible d in [d_lo, d_hi)
  bool range_empty = false;    // "no admissible d"
  double max_value_residual = 0;      // Dirichlet/continuity defects of B phi_k
  double max_kirchhoff_residual = 0;  // Neumann/Kirchhoff defects of B phi_k
  int modes_checked = 0;
};

// Selects the admissible smoothness window from the boundary kinds of the
// basis support, then verifies pointwise that each B phi_k satisfies the same
// vertex conditions as the basis. Throws if a boundary identity fails;
// an empty window is reported, not thrown.
AssumptionIIReport check_assumption_II(const SpectralBasis& basis, const ControlOperator& B,
                                       double eta, double a, int n_modes = 0);

// ---- perturbed spectra ----

struct PerturbedSpectrum {
  double u0 = 0;
  Eigen::VectorXd mu;        // ascending
  Eigen::MatrixXcd vectors;  // columns, phase-fixed: largest entry real positive
};

PerturbedSpectrum perturbed_spectrum(const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat,
                                     double u0, int N);

struct NondegeneracyRow {
  double u0 = 0;
  double min_quadruple = 0;  // min |combo| over the unperturbed exact quadruples
  double min_coupling = 0;   // min_k |<phi_k^{u0}, B phi_1^{u0}>|
  int coupling_k = 0;
  bool pass = false;
};

struct NondegeneracyReport {
  std::vector<NondegeneracyRow> rows;
  int n_quadruples = 0;
  double tol = 0;
  bool pass = false;  // all rows pass
};

NondegeneracyReport scan_nondegeneracy(const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat,
                                       const std::vector<double>& u0_grid, int N, double tol);

}  // namespace qgc
