#pragma once

// Galerkin-truncated bilinear Schrodinger dynamics i d/dt psi = (A + u(t)B) psi
// with exact unitary per-step exponentials, a periodic fast path for long
// single-harmonic drives, and an independent mild-solution (Picard) integrator
// used for cross-validation.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qgc/basis.hpp"
#include "qgc/control.hpp"

namespace qgc {

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXcd> states;
  std::vector<double> norm;  // l2 norm per node
  std::vector<double> h1;    // mode-weighted H^1 norm per node
  std::vector<double> h3;    // mode-weighted H^3 norm per node
  std::vector<std::string> warnings;

  const Eigen::VectorXcd& final_state() const;
  double final_time() const;
  double max_norm_drift() const;  // max |norm - norm[0]|
};

struct EvolveOptions {
  bool allow_periodic_fast_path = true;  // repeated one-period propagator for
                                         // long single-harmonic drives
  int max_nodes = 4096;                  // recording is thinned beyond this
};

// Piecewise-constant signals are propagated exactly per piece (Hermitian
// eigendecomposition); trigonometric signals use a 4th-order commutator-free
// two-exponential step and require dt_max <= (shortest period)/20.
Trajectory evolve(const Eigen::VectorXcd& psi0, const ControlSignal& u,
                  const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat, double dt_max,
                  const EvolveOptions& opts = {});

struct PicardResult {
  Eigen::VectorXcd psi;        // state at T
  std::vector<double> deltas;  // sup-norm change per sweep (contraction trace)
  int iterations = 0;
};

// Picard iteration of psi(t) = e^{-iAt} psi0 - i int_0^t e^{-iA(t-s)} u(s) B psi(s) ds
// on a uniform trapezoidal grid; throws if the iteration diverges.
PicardResult duhamel_picard(const Eigen::VectorXcd& psi0, const ControlSignal& u,
                            const Eigen::VectorXd& Adiag, const Eigen::MatrixXcd& Bmat, double T,
                            int n_iter, int n_quad);

// |<phi, psi>| clamped to [0, 1].
double fidelity(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi);
double fidelity(const QuantumState& psi, const QuantumState& phi);

}  // namespace qgc
