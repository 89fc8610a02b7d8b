#pragma once

// Orthonormal eigen-systems stored symbolically: each mode is, per supporting
// edge, a*cos(omega*x) + b*sin(omega*x) with omega = sqrt(mu). Construction is
// O(1) per mode; orthonormality and boundary satisfaction are verified by the
// quadrature checkers below rather than trusted.

#include <Eigen/Dense>

#include <vector>

#include "qgc/graph.hpp"

namespace qgc {

struct EdgeCoef {
  int edge = -1;
  double a = 0;  // cosine coefficient
  double b = 0;  // sine coefficient
};

struct EigenMode {
  int k = 0;                    // global index after merge/sort, 1-based
  double mu = 0;                // eigenvalue
  long double omega = 0;        // sqrt(mu), kept in extended precision
  std::vector<EdgeCoef> coef;   // one entry per supporting edge
  int m = 0;                    // family mode number (0 when not applicable)
  int length_class = 0;         // 1-based length class (0 when not applicable)

  bool supports(int edge) const;
  const EdgeCoef* find(int edge) const;
  long double eval(int edge, long double x) const;    // 0 off support
  long double deriv(int edge, long double x) const;
};

class SpectralBasis {
 public:
  // Modes must arrive sorted with strictly increasing eigenvalues and be
  // supported on finite edges only; indices k are (re)assigned 1..N.
  SpectralBasis(MetricGraph graph, std::vector<EigenMode> modes);

  const MetricGraph& graph() const { return graph_; }
  const std::vector<EigenMode>& modes() const { return modes_; }
  const EigenMode& mode(int k) const;        // 1-based
  int size() const { return static_cast<int>(modes_.size()); }

  std::vector<double> eigenvalues() const;
  std::vector<int> support_union() const;    // edges carrying any mode

 private:
  MetricGraph graph_;
  std::vector<EigenMode> modes_;
};

SpectralBasis tadpole_basis(int n_modes);

// Pairs of equal-length edges joined at one Neumann-Kirchhoff centre with
// Dirichlet tips; per length class l and mode number m, the antisymmetric
// two-edge mode with mu = (m*pi/L_l)^2. Classes are merged by eigenvalue;
// a cross-class collision within relative 1e-9 is an error.
SpectralBasis star_pair_basis(const std::vector<double>& lengths, int modes_per_length);

// Two equal edges, three vertices; the class picks the end conditions and the
// eigenvalue family (see ChainClass).
SpectralBasis uniform_chain_basis(double length, ChainClass cls, int n_modes);

// ---- verification ----------------------------------------------------------

// Quadrature Gram matrix of the first N modes.
Eigen::MatrixXd gram_matrix(const SpectralBasis& basis, int N);

struct BoundaryResidual {
  double max_dirichlet = 0;   // |value| at Dirichlet vertices
  double max_neumann = 0;     // |derivative| at Neumann vertices
  double max_continuity = 0;  // value spread across incident edges at NK vertices
  double max_kirchhoff = 0;   // |sum of outgoing derivatives| at NK vertices
  double worst() const;
};

BoundaryResidual check_mode_boundaries(const SpectralBasis& basis, int N);

// ---- states ----------------------------------------------------------------

struct QuantumState {
  Eigen::VectorXcd c;                       // c_k = <phi_k, psi>, k = 1..N
  const SpectralBasis* basis = nullptr;     // optional back-reference
};

// (sum_k |k^s c_k|^2)^(1/2); s = 0 is the plain l2 norm.
double hs_norm(const QuantumState& state, double s);
double hs_norm(const Eigen::VectorXcd& c, double s);

}  // namespace qgc
