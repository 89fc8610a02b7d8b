#include "qgc/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgc/config.hpp"
#include "qgc/core.hpp"
#include "qgc/expression.hpp"
#include "qgc/quadrature.hpp"

namespace qgc {

// ---- polynomial helpers ----

namespace {

using Poly = std::vector<long double>;

Poly padd(const Poly& a, const Poly& b, long double sb) {
  Poly r(std::max(a.size(), b.size()), 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
  return r;
}

Poly pmul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly pscale(Poly a, long double s) {
  for (auto& c : a) c *= s;
  return a;
}

long double peval(const Poly& p, long double x) {
  long double r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

Poly pderiv(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly r(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = static_cast<long double>(i) * p[i];
  return r;
}

bool pconst(const Poly& p) { return p.size() <= 1; }

long double pconst_value(const Poly& p) { return p.empty() ? 0.0L : p[0]; }

// ---- structural extraction: polynomial times at most one harmonic ----

struct Extracted {
  Poly poly;
  Profile::Trig trig = Profile::Trig::None;
  long double freq = 0, phase = 0;
  bool has_trig() const { return trig != Profile::Trig::None; }
};

[[noreturn]] void reject(const char* why) {
  throw Error(std::string("unsupported profile: ") + why +
              " (expected a polynomial times at most one cos/sin factor)");
}

Extracted extract(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number: return {{e.value}};
    case K::Pi: return {{kPiL}};
    case K::Var: return {{0.0L, 1.0L}};
    case K::Neg: {
      Extracted a = extract(e.args[0]);
      a.poly = pscale(std::move(a.poly), -1.0L);
      return a;
    }
    case K::Add:
    case K::Sub: {
      Extracted a = extract(e.args[0]);
      Extracted b = extract(e.args[1]);
      const long double sb = e.kind == K::Add ? 1.0L : -1.0L;
      if (!a.has_trig() && !b.has_trig()) return {padd(a.poly, b.poly, sb)};
      if (a.has_trig() && b.has_trig() && a.trig == b.trig && a.freq == b.freq &&
          a.phase == b.phase)
        return {padd(a.poly, b.poly, sb), a.trig, a.freq, a.phase};
      if (std::all_of(a.poly.begin(), a.poly.end(), [](long double c) { return c == 0; })) {
        b.poly = pscale(std::move(b.poly), sb);
        return b;
      }
      if (std::all_of(b.poly.begin(), b.poly.end(), [](long double c) { return c == 0; }))
        return a;
      reject("sum of distinct oscillatory factors");
    }
    case K::Mul: {
      Extracted a = extract(e.args[0]);
      Extracted b = extract(e.args[1]);
      if (a.has_trig() && b.has_trig()) reject("product of two oscillatory factors");
      Extracted r = a.has_trig() ? a : b;
      r.poly = pmul(a.poly, b.poly);
      return r;
    }
    case K::Div: {
      Extracted a = extract(e.args[0]);
      Extracted b = extract(e.args[1]);
      if (b.has_trig() || !pconst(b.poly)) reject("division by a non-constant");
      const long double d = pconst_value(b.poly);
      if (d == 0) throw Error("profile divides by zero");
      a.poly = pscale(std::move(a.poly), 1.0L / d);
      return a;
    }
    case K::Pow: {
      Extracted a = extract(e.args[0]);
      Extracted b = extract(e.args[1]);
      if (b.has_trig() || !pconst(b.poly)) reject("non-constant exponent");
      const long double pv = pconst_value(b.poly);
      if (!a.has_trig() && pconst(a.poly))
        return {{std::pow(pconst_value(a.poly), pv)}};
      if (a.has_trig()) reject("power of an oscillatory factor");
      const long double nr = std::round(pv);
      if (std::fabs(pv - nr) > 1e-12L || nr < 0 || nr > 64)
        reject("non-integer power of x");
      Poly r{1.0L};
      for (int i = 0; i < static_cast<int>(nr); ++i) r = pmul(r, a.poly);
      return {std::move(r)};
    }
    case K::Call: {
      Extracted a = extract(e.args[0]);
      if (e.func == "cos" || e.func == "sin") {
        if (a.has_trig()) reject("nested oscillatory argument");
        if (a.poly.size() > 2) reject("non-linear cos/sin argument");
        const long double c0 = a.poly.empty() ? 0.0L : a.poly[0];
        const long double c1 = a.poly.size() > 1 ? a.poly[1] : 0.0L;
        if (c1 == 0)
          return {{e.func == "cos" ? std::cos(c0) : std::sin(c0)}};
        return {{1.0L}, e.func == "cos" ? Profile::Trig::Cos : Profile::Trig::Sin, c1, c0};
      }
      if (a.has_trig() || !pconst(a.poly)) reject("non-constant function argument");
      const long double v = pconst_value(a.poly);
      if (e.func == "cbrt") return {{std::cbrt(v)}};
      if (e.func == "sqrt") return {{std::sqrt(v)}};
      if (e.func == "abs") return {{std::fabs(v)}};
      reject("unknown function");
    }
  }
  reject("unrecognized expression");
}

}  // namespace

// ---- Profile ----

Profile Profile::polynomial(std::vector<long double> coeffs) {
  Profile p;
  p.poly_ = std::move(coeffs);
  return p;
}

Profile Profile::harmonic(Trig t, long double freq, long double phase, long double amplitude) {
  Profile p;
  p.poly_ = {amplitude};
  p.trig_ = t;
  p.freq_ = freq;
  p.phase_ = phase;
  return p;
}

Profile Profile::parse(std::string_view expr) {
  Extracted ex = extract(parse_expression(expr));
  Profile p;
  p.poly_ = std::move(ex.poly);
  p.trig_ = ex.trig;
  p.freq_ = ex.freq;
  p.phase_ = ex.phase;
  return p;
}

long double Profile::operator()(long double x) const {
  long double v = peval(poly_, x);
  if (trig_ == Trig::Cos) v *= std::cos(freq_ * x + phase_);
  if (trig_ == Trig::Sin) v *= std::sin(freq_ * x + phase_);
  return v;
}

long double Profile::derivative(long double x) const {
  long double dp = peval(pderiv(poly_), x);
  if (trig_ == Trig::None) return dp;
  const long double arg = freq_ * x + phase_;
  const long double p = peval(poly_, x);
  if (trig_ == Trig::Cos) return dp * std::cos(arg) - p * freq_ * std::sin(arg);
  return dp * std::sin(arg) + p * freq_ * std::cos(arg);
}

bool Profile::zero() const {
  return std::all_of(poly_.begin(), poly_.end(), [](long double c) { return c == 0; });
}

// ---- ControlOperator ----

ControlOperator::ControlOperator(const MetricGraph& graph, std::vector<CouplingTerm> terms)
    : terms_(std::move(terms)) {
  const auto& edges = graph.edges();
  for (const auto& t : terms_) {
    if (t.out_edge < 0 || t.out_edge >= static_cast<int>(edges.size()) || t.in_edge < 0 ||
        t.in_edge >= static_cast<int>(edges.size()))
      throw Error("coupling term references an edge outside the graph");
    if (t.sign != 1 && t.sign != -1) throw Error("coupling term sign must be +1 or -1");
    if (!(t.scale > 0)) throw Error("coupling term scale must be positive");
    const double len_out = edges[t.out_edge].length;
    const double len_in = edges[t.in_edge].length;
    if (!std::isfinite(len_out))
      throw Error("coupling term output edge must have finite length");
    if (std::isfinite(len_in) && t.scale * len_out > len_in * (1 + 1e-9))
      throw Error("coupling term coordinate map leaves the input edge");
  }
}

ControlOperator tadpole_control(const MetricGraph& graph) {
  const int head = graph.edge_index("head");
  return ControlOperator(graph, {{head, head, Profile::polynomial({0.0L, 1.0L, -1.0L}), 1.0, +1}});
}

ControlOperator star_control(const MetricGraph& graph, const std::vector<double>& lengths) {
  if (lengths.size() != 2)
    throw Error("star control operator is defined for exactly two length classes");
  std::vector<CouplingTerm> terms;
  for (int l = 0; l < 2; ++l) {
    const int lo = 1 - l;
    const long double A = lengths[static_cast<std::size_t>(l)];
    const long double Bl = lengths[static_cast<std::size_t>(lo)];
    const Profile same = Profile::harmonic(Profile::Trig::Cos, kPiL / (3 * A), 0, A * A / 2);
    const Profile cross = Profile::harmonic(Profile::Trig::Cos, kPiL / (3 * A), 0, Bl / 2);
    const double sigma = static_cast<double>(Bl / A);
    for (int side = 0; side < 2; ++side) {
      const int out = graph.edge_index("e" + std::to_string(2 * l + side + 1));
      const int in_cross = graph.edge_index("e" + std::to_string(2 * lo + side + 1));
      terms.push_back({out, out, same, 1.0, +1});
      terms.push_back({out, in_cross, cross, sigma, +1});
    }
  }
  return ControlOperator(graph, std::move(terms));
}

ControlOperator operator_from_config(const MetricGraph& graph, const Config& cfg) {
  std::vector<CouplingTerm> terms;
  for (const std::string& p : cfg.block_prefixes("B.term")) {
    CouplingTerm t;
    try {
      t.out_edge = graph.edge_index(cfg.get_string(p + ".out_edge"));
      t.in_edge = graph.edge_index(cfg.get_string(p + ".in_edge"));
      t.profile = Profile::parse(cfg.get_string(p + ".profile"));
      t.scale = cfg.get_number(p + ".scale", 1.0);
      t.sign = cfg.get_int(p + ".sign", +1);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(cfg.origin() + ": [[B.term]] " + p + ": " + e.what());
    }
    if (t.sign != 1 && t.sign != -1)
      throw ConfigError(cfg.origin() + ": [[B.term]] " + p + ": sign must be +1 or -1");
    terms.push_back(std::move(t));
  }
  if (terms.empty())
    throw ConfigError(cfg.origin() + ": operator needs at least one [[B.term]] block");
  try {
    return ControlOperator(graph, std::move(terms));
  } catch (const Error& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
}

// ---- matrix elements ----

std::complex<double> matrix_element(const ControlOperator& B, const SpectralBasis& basis,
                                    const EigenMode& phi_j, const EigenMode& phi_k) {
  const auto& edges = basis.graph().edges();
  long double total = 0;
  for (const auto& t : B.terms()) {
    if (!phi_j.supports(t.out_edge) || !phi_k.supports(t.in_edge)) continue;
    const long double len = edges[t.out_edge].length;
    const double freq = std::fabs(static_cast<double>(phi_j.omega)) +
                        t.scale * std::fabs(static_cast<double>(phi_k.omega)) +
                        t.profile.max_frequency();
    const auto& rule = GaussLegendre::cached(oscillatory_order(freq, static_cast<double>(len)));
    const long double sigma = t.scale;
    total += t.sign * rule.integrate(0.0L, len, [&](long double x) {
      return phi_j.eval(t.out_edge, x) * t.profile(x) * phi_k.eval(t.in_edge, sigma * x);
    });
  }
  return {static_cast<double>(total), 0.0};
}

std::complex<double> matrix_element(const ControlOperator& B, const SpectralBasis& basis,
                                    int j, int k) {
  return matrix_element(B, basis, basis.mode(j), basis.mode(k));
}

CouplingMatrix assemble_matrix(const ControlOperator& B, const SpectralBasis& basis, int N) {
  if (N <= 0 || N > basis.size())
    throw Error("matrix size exceeds the available basis modes");
  Eigen::MatrixXcd raw(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      raw(j, k) = matrix_element(B, basis, basis.modes()[static_cast<std::size_t>(j)],
                                 basis.modes()[static_cast<std::size_t>(k)]);
  const double defect = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "control matrix is not symmetric (hermiticity defect " << defect << ")";
    throw Error(os.str());
  }
  CouplingMatrix out;
  out.M = 0.5 * (raw + raw.adjoint().eval());
  out.hermiticity_defect = defect;
  return out;
}

// ---- pointwise image of a basis mode ----

double control_image_value(const ControlOperator& B, const SpectralBasis& basis, int k,
                           int edge, double x) {
  const EigenMode& phi = basis.mode(k);
  long double v = 0;
  for (const auto& t : B.terms()) {
    if (t.out_edge != edge || !phi.supports(t.in_edge)) continue;
    v += t.sign * t.profile(x) * phi.eval(t.in_edge, t.scale * static_cast<long double>(x));
  }
  return static_cast<double>(v);
}

double control_image_derivative(const ControlOperator& B, const SpectralBasis& basis, int k,
                                int edge, double x) {
  const EigenMode& phi = basis.mode(k);
  long double v = 0;
  for (const auto& t : B.terms()) {
    if (t.out_edge != edge || !phi.supports(t.in_edge)) continue;
    const long double sx = t.scale * static_cast<long double>(x);
    v += t.sign * (t.profile.derivative(x) * phi.eval(t.in_edge, sx) +
                   t.scale * t.profile(x) * phi.deriv(t.in_edge, sx));
  }
  return static_cast<double>(v);
}

// ---- closed forms ----

double tadpole_coupling_oracle(int k) {
  if (k < 2) throw Error("loop-graph coupling oracle needs k >= 2");
  const long double kk = static_cast<long double>(k) * k - 1;
  return static_cast<double>(-2.0L * k / (kk * kk * kPiL * kPiL));
}

double star_coupling_oracle(int m, bool same_class, double L) {
  if (m < 1) throw Error("star coupling oracle needs m >= 1");
  const long double m2 = static_cast<long double>(m) * m;
  const long double denom = std::fabs(81 * m2 * m2 - 180 * m2 + 64);
  const long double front = same_class ? 2.0L : 1.0L;
  return static_cast<double>(front * L * L * 27 * std::sqrt(3.0L) * m / (denom * kPiL));
}

double star_diagonal_oracle(int m, double L) {
  if (m < 1) throw Error("star diagonal oracle needs m >= 1");
  const long double m2 = static_cast<long double>(m) * m;
  return static_cast<double>(27 * std::sqrt(3.0L) * L * L * m2 / ((36 * m2 - 1) * kPiL));
}

}  // namespace qgc
