#pragma once

// Bounded symmetric control operators, represented as finite sums of
// edge-coupling multiplication terms: (B psi)^out(x) += sign * profile(x) *
// psi^in(scale * x). Profiles are polynomial-times-one-harmonic, which covers
// every worked example and keeps quadrature orders predictable.

#include <Eigen/Dense>

#include <complex>
#include <string_view>
#include <vector>

#include "qgc/basis.hpp"
#include "qgc/graph.hpp"

namespace qgc {

class Profile {
 public:
  enum class Trig { None, Cos, Sin };

  Profile() = default;
  static Profile polynomial(std::vector<long double> coeffs);
  static Profile harmonic(Trig t, long double freq, long double phase = 0,
                          long double amplitude = 1);
  // Parses e.g. "x*(1-x)" or "cbrt(2)*cos(pi*x/(3*cbrt(2)))". Anything that is
  // not polynomial-times-one-harmonic is rejected.
  static Profile parse(std::string_view expr);

  long double operator()(long double x) const;
  long double derivative(long double x) const;
  double max_frequency() const { return trig_ == Trig::None ? 0.0 : std::fabs(static_cast<double>(freq_)); }
  bool zero() const;

  const std::vector<long double>& poly() const { return poly_; }
  Trig trig() const { return trig_; }

 private:
  std::vector<long double> poly_{};  // ascending coefficients; empty = zero
  Trig trig_ = Trig::None;
  long double freq_ = 0, phase_ = 0;
};

struct CouplingTerm {
  int out_edge = -1;
  int in_edge = -1;
  Profile profile;
  double scale = 1.0;  // coordinate map: reads psi^in at scale*x
  int sign = +1;
};

class ControlOperator {
 public:
  // Validates edges and the coordinate map (scale * L_out <= L_in).
  ControlOperator(const MetricGraph& graph, std::vector<CouplingTerm> terms);

  const std::vector<CouplingTerm>& terms() const { return terms_; }

 private:
  std::vector<CouplingTerm> terms_;
};

// The worked operators.
ControlOperator tadpole_control(const MetricGraph& graph);  // x(1-x) on the loop
ControlOperator star_control(const MetricGraph& graph, const std::vector<double>& lengths);

class Config;

// Builds an operator from the config's [[B.term]] blocks; each block holds
// out_edge and in_edge (edge ids), profile (a parseable expression), and
// optional scale (default 1) and sign (default +1).
ControlOperator operator_from_config(const MetricGraph& graph, const Config& cfg);

// <phi_j, B phi_k> by Gauss-Legendre quadrature (extended precision inside).
std::complex<double> matrix_element(const ControlOperator& B, const SpectralBasis& basis,
                                    const EigenMode& phi_j, const EigenMode& phi_k);
std::complex<double> matrix_element(const ControlOperator& B, const SpectralBasis& basis,
                                    int j, int k);  // 1-based indices

struct CouplingMatrix {
  Eigen::MatrixXcd M;               // symmetrized
  double hermiticity_defect = 0;    // max |M - M^H| before symmetrization
};

// Batched matrix elements; throws if the pre-symmetrization defect exceeds
// 1e-10 (a non-symmetric term set).
CouplingMatrix assemble_matrix(const ControlOperator& B, const SpectralBasis& basis, int N);

// Pointwise data of (B phi_k) on an edge — used for boundary-identity checks.
double control_image_value(const ControlOperator& B, const SpectralBasis& basis, int k,
                           int edge, double x);
double control_image_derivative(const ControlOperator& B, const SpectralBasis& basis, int k,
                                int edge, double x);

// Closed forms. The loop-graph first-column element is exact; the star
// off-diagonal expression is a magnitude reference (its m = 1 denominator is
// negative, so the absolute value is returned), while the star diagonal is
// exact and quadrature-matched.
double tadpole_coupling_oracle(int k);                             // k >= 2
double star_coupling_oracle(int m, bool same_class, double L);
double star_diagonal_oracle(int m, double L);

}  // namespace qgc
