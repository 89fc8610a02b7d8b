#pragma once

// Control synthesis: truncated moment problems (linearized steering),
// admissible planar generators and their Lie closure, Givens-style rotation
// plans, resonant pulse design, and exact control-budget accounting.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "qgc/operator.hpp"

namespace qgc {

// ---- control signals ----

class ControlSignal {
 public:
  struct TrigTerm {
    double omega = 0;  // p*cos(omega t) + q*sin(omega t)
    double p = 0, q = 0;
  };

  static ControlSignal zero(double T);
  static ControlSignal piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static ControlSignal trig(double T, double offset, std::vector<TrigTerm> terms);

  double operator()(double t) const;
  double horizon() const { return horizon_; }
  bool is_piecewise() const { return form_ == Form::Piecewise; }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double offset() const { return offset_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

 private:
  enum class Form { Piecewise, Trig };
  Form form_ = Form::Piecewise;
  double horizon_ = 0;
  std::vector<double> breakpoints_;  // size values_.size() + 1, starts at 0
  std::vector<double> values_;
  double offset_ = 0;
  std::vector<TrigTerm> terms_;
};

struct Budget {
  double bv = 0;      // total variation over [0, T], interior jumps only
  double linf = 0;
  double t_linf = 0;  // horizon * linf
};

// Exact norms from the symbolic form (single-harmonic and piecewise forms are
// closed-form; multi-harmonic signals use root-bracketed critical points).
Budget budget_report(const ControlSignal& u);

// ---- moment problems ----

struct MomentProblem {
  std::vector<double> omega;             // strictly increasing, omega_1 = 0 in the standard setup
  std::vector<std::complex<double>> r;   // targets x_k / B_k1
  double T = 0;
  bool reality_k1 = false;               // i * r_1 * B_11 must be real

  // omega_k = mu_k - mu_1, r_k = x_k / B_k1; throws on a vanishing coupling
  // or, when reality is requested, on a target with nonzero Re(x_1).
  static MomentProblem from_targets(const std::vector<double>& mu, const Eigen::VectorXcd& x,
                                    const Eigen::VectorXcd& Bcol1, double T, bool reality_k1);
};

struct MomentSolution {
  ControlSignal u;                 // piecewise-constant on a uniform grid
  std::vector<double> residuals;   // per moment row
  double max_residual = 0;
  double cond = 0;                 // of the regularized dual system
  double lambda = 0;               // ridge actually used
};

// Smallest sample count accepted for this problem (resolution precondition).
int moment_sample_floor(const MomentProblem& mp);

// Minimum-norm piecewise-constant solution of the moment constraints, via the
// ridge-regularized dual normal system. Constraint rows are integrated
// exactly per piece. Default ridge: 1e-10 * ||A||_2^2.
MomentSolution solve_moment_problem(const MomentProblem& mp, int n_samples,
                                    std::optional<double> ridge = std::nullopt);

// Exact re-integration of -i * integral(u e^{i omega_k tau}) against the
// targets; returns the max residual.
double verify_moments(const ControlSignal& u, const MomentProblem& mp);

// ---- planar generators and rotation plans ----

struct GeneratorSet {
  std::vector<std::pair<int, int>> pairs;  // 1-based (j, k), j < k
  int N = 0;
};

// Pairs with |B_jk| > tol whose transition frequency |mu_j - mu_k| is not
// shared with any other coupled pair.
GeneratorSet admissible_generators(const CouplingMatrix& Bmat, const std::vector<double>& mu,
                                   int N, double tol);

// E^theta: e^{i theta} at (j,k), -e^{-i theta} at (k,j), zero elsewhere.
Eigen::MatrixXcd planar_generator(int N, int j, int k, double theta);

// Dimension of the real Lie algebra generated by {E^0_jk, E^{pi/2}_jk} over
// the admissible pairs; bounded by N^2 - 1.
int lie_closure_rank(const GeneratorSet& gens, int N);

struct RotationFactor {
  int j = 0, k = 0;      // 1-based plane indices, j < k
  double theta = 0;
  double alpha = 0;
};

struct RotationPlan {
  std::vector<RotationFactor> factors;  // target = prod exp(alpha E^theta) * diag
  Eigen::VectorXcd diagonal;            // unit-modulus phase residual
};

// Givens-style factorization of a special-unitary target (checked to 1e-10).
RotationPlan plan_rotations(const Eigen::MatrixXcd& target);
Eigen::MatrixXcd reconstruct_rotations(const RotationPlan& plan, int N);

// Haar-distributed special-unitary sample (QR with phase-fixed R diagonal,
// then determinant-normalized) — test targets for plan_rotations.
Eigen::MatrixXcd haar_special_unitary(int N, std::mt19937_64& rng);

// Free-drift time t <= t_max with e^{-i mu_k t} matching the plan's diagonal
// phases within tol (max modulus distance), if one exists on the grid search.
std::optional<double> match_drift_phase(const Eigen::VectorXcd& diagonal,
                                        const std::vector<double>& mu, double t_max, double tol);

// ---- resonant pulses ----

// u(t) = 2A cos(|omega_jk| t + phase) over T = alpha / (A |Bjk|), first-order
// rotating-wave realization of exp(alpha E^theta_{jk}). omega_jk is the
// signed transition frequency mu_j - mu_k; its sign selects the phase branch.
ControlSignal resonant_pulse(int j, int k, double theta_phase, double alpha, double A,
                             std::complex<double> Bjk, double omega_jk);

}  // namespace qgc
