#include <cmath>
#include <complex>

#include "doctest.h"
#include "qgc/basis.hpp"
#include "qgc/config.hpp"
#include "qgc/core.hpp"
#include "qgc/graph.hpp"
#include "qgc/operator.hpp"

using namespace qgc;

// ---- profiles ----

TEST_CASE("profiles evaluate, differentiate, and report their frequency") {
  const Profile p = Profile::parse("x*(1-x)");
  CHECK(static_cast<double>(p(0.25L)) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(static_cast<double>(p.derivative(0.25L)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(p.max_frequency() == 0.0);
  CHECK_FALSE(p.zero());
  CHECK(p.trig() == Profile::Trig::None);
  CHECK(static_cast<double>(p.derivative(0.5L)) == doctest::Approx(0.0).epsilon(1e-13));

  const double L = std::cbrt(2.0);
  const Profile h = Profile::parse("(cbrt(2)/2)*cos(pi*x/(3*cbrt(2)))");
  const double w = kPi / (3 * L);
  CHECK(h.max_frequency() == doctest::Approx(w).epsilon(1e-14));
  CHECK(static_cast<double>(h(0.7L)) ==
        doctest::Approx(L / 2 * std::cos(w * 0.7)).epsilon(1e-14));
  CHECK(static_cast<double>(h.derivative(0.7L)) ==
        doctest::Approx(-L / 2 * w * std::sin(w * 0.7)).epsilon(1e-13));

  const Profile z = Profile::polynomial({});
  CHECK(z.zero());
  CHECK(static_cast<double>(z(0.3L)) == 0.0);
}

TEST_CASE("profiles outside polynomial-times-one-harmonic are rejected") {
  CHECK_THROWS_AS((void)Profile::parse("cos(x)*sin(x)"), Error);
  CHECK_THROWS_AS((void)Profile::parse("cos(x^2)"), Error);
  CHECK_THROWS_AS((void)Profile::parse("1/x"), Error);
  CHECK_THROWS_AS((void)Profile::parse("x^x"), Error);
}

// ---- loop-graph coupling column ----

TEST_CASE("the loop coupling column matches its closed form") {
  CHECK(tadpole_coupling_oracle(2) == doctest::Approx(-4.0 / (9 * kPi * kPi)).epsilon(1e-15));
  CHECK(tadpole_coupling_oracle(10) ==
        doctest::Approx(-20.0 / (9801 * kPi * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS((void)tadpole_coupling_oracle(1), Error);

  // |B_k1| k^3 stays within its exact decay corridor
  for (int k = 2; k <= 100; ++k) {
    const double v = std::fabs(tadpole_coupling_oracle(k)) * k * k * k;
    CHECK(v >= 2.0 / (kPi * kPi) - 1e-12);
    CHECK(v <= 32.0 / (9 * kPi * kPi) + 1e-12);
  }

  const MetricGraph g = tadpole_graph();
  const SpectralBasis basis = tadpole_basis(12);
  const ControlOperator B = tadpole_control(g);
  for (int k = 2; k <= 12; ++k) {
    const std::complex<double> q = matrix_element(B, basis, k, 1);
    CHECK(std::fabs(q.imag()) < 1e-14);
    CHECK(q.real() == doctest::Approx(tadpole_coupling_oracle(k)).epsilon(1e-10));
  }
  const std::complex<double> diag = matrix_element(B, basis, 1, 1);
  CHECK(diag.real() ==
        doctest::Approx(1.0 / 6.0 + 1.0 / (8 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("assembled matrices are real symmetric with tiny hermiticity defect") {
  const SpectralBasis basis = tadpole_basis(5);
  const CouplingMatrix m = assemble_matrix(tadpole_control(basis.graph()), basis, 5);
  CHECK(m.hermiticity_defect <= 1e-10);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) {
      CHECK(std::fabs(m.M(j, k).imag()) < 1e-14);
      CHECK(std::abs(m.M(j, k) - std::conj(m.M(k, j))) < 1e-14);
    }
  for (int k = 2; k <= 5; ++k)
    CHECK(m.M(k - 1, 0).real() ==
          doctest::Approx(tadpole_coupling_oracle(k)).epsilon(1e-10));
}

TEST_CASE("an empty term set gives the zero operator") {
  const MetricGraph g = tadpole_graph();
  const ControlOperator none(g, {});
  const SpectralBasis basis = tadpole_basis(3);
  CHECK(std::abs(matrix_element(none, basis, 2, 1)) == 0.0);
}

// ---- star operator ----

TEST_CASE("star diagonal entries match the closed form in both classes") {
  const std::vector<double> lengths = {std::cbrt(2.0), std::cbrt(5.0)};
  const SpectralBasis basis = star_pair_basis(lengths, 8);
  const ControlOperator B = star_control(basis.graph(), lengths);
  const CouplingMatrix m = assemble_matrix(B, basis, basis.size());
  CHECK(m.hermiticity_defect <= 1e-10);

  for (int k = 1; k <= basis.size(); ++k) {
    const EigenMode& md = basis.mode(k);
    const double L = lengths[static_cast<std::size_t>(md.length_class - 1)];
    const double want = star_diagonal_oracle(md.m, L);
    CHECK(m.M(k - 1, k - 1).real() == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("the star off-diagonal magnitude reference decays like m^-3") {
  for (double L : {std::cbrt(2.0), std::cbrt(5.0)}) {
    for (int m = 2; m <= 100; ++m) {
      const double same = star_coupling_oracle(m, true, L) * m * m * m;
      const double cross = star_coupling_oracle(m, false, L) * m * m * m;
      CHECK(same > 0.0);
      CHECK(cross > 0.0);
      CHECK(same == doctest::Approx(2 * cross).epsilon(1e-12));
      CHECK(same > 27 * std::sqrt(3.0) * L * L / (42 * kPi));  // comfortably bounded below
    }
  }
}

// ---- boundary identities of B phi_k ----

TEST_CASE("the control image vanishes where the basis does") {
  const std::vector<double> lengths = {std::cbrt(2.0), std::cbrt(5.0)};
  const SpectralBasis star = star_pair_basis(lengths, 4);
  const ControlOperator sb = star_control(star.graph(), lengths);
  for (int k = 1; k <= 4; ++k)
    for (int e = 0; e < 4; ++e) {
      const double L = star.graph().edge(e).length;
      CHECK(std::fabs(control_image_value(sb, star, k, e, L)) < 1e-10);  // Dirichlet tips
    }

  const SpectralBasis loop = tadpole_basis(4);
  const ControlOperator lb = tadpole_control(loop.graph());
  const int head = loop.support_union()[0];
  for (int k = 1; k <= 4; ++k) {
    // x(1-x) kills both the value and the x-weighted derivative sum at the vertex
    CHECK(std::fabs(control_image_value(lb, loop, k, head, 0.0)) < 1e-12);
    CHECK(std::fabs(control_image_value(lb, loop, k, head, 1.0)) < 1e-12);
    const double kirchhoff = control_image_derivative(lb, loop, k, head, 0.0) -
                             control_image_derivative(lb, loop, k, head, 1.0);
    CHECK(std::fabs(kirchhoff) < 1e-10);
  }
}

// ---- config-driven construction ----

TEST_CASE("an operator built from config blocks matches the built-in one") {
  const char* text = R"(
[[B.term]]
out_edge = head
in_edge = head
profile = x*(1-x)
)";
  const SpectralBasis basis = tadpole_basis(6);
  const Config cfg = Config::parse_string(text);
  const ControlOperator B = operator_from_config(basis.graph(), cfg);
  const ControlOperator ref = tadpole_control(basis.graph());
  const CouplingMatrix mb = assemble_matrix(B, basis, 6);
  const CouplingMatrix mr = assemble_matrix(ref, basis, 6);
  CHECK((mb.M - mr.M).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("config operators reject bad blocks") {
  const MetricGraph g = tadpole_graph();
  CHECK_THROWS_AS((void)operator_from_config(g, Config::parse_string("[scenario]\nkind = x\n")),
                  ConfigError);  // no blocks at all

  const char* unknown_edge = R"(
[[B.term]]
out_edge = nope
in_edge = head
profile = x
)";
  CHECK_THROWS_AS((void)operator_from_config(g, Config::parse_string(unknown_edge)), ConfigError);

  const char* bad_sign = R"(
[[B.term]]
out_edge = head
in_edge = head
profile = x
sign = 2
)";
  CHECK_THROWS_AS((void)operator_from_config(g, Config::parse_string(bad_sign)), ConfigError);

  const char* bad_map = R"(
[[B.term]]
out_edge = head
in_edge = head
profile = x
scale = 2
)";
  // scale * L_out > L_in: reads past the end of the source edge
  CHECK_THROWS_AS((void)operator_from_config(g, Config::parse_string(bad_map)), ConfigError);
}

TEST_CASE("a term whose adjoint is missing fails the symmetry gate") {
  const SpectralBasis basis = tadpole_basis(4);
  const MetricGraph& g = basis.graph();
  std::vector<CouplingTerm> terms;
  // reads psi at x/2: not self-adjoint without its mirror term
  terms.push_back({g.edge_index("head"), g.edge_index("head"), Profile::parse("x"), 0.5, +1});
  const ControlOperator lopsided(g, std::move(terms));
  CHECK_THROWS_AS((void)assemble_matrix(lopsided, basis, 4), Error);
}
