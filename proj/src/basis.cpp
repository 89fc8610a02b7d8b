#include "qgc/basis.hpp"

#include <algorithm>
#include <cmath>

#include "qgc/core.hpp"
#include "qgc/quadrature.hpp"

namespace qgc {

bool EigenMode::supports(int edge) const { return find(edge) != nullptr; }

const EdgeCoef* EigenMode::find(int edge) const {
  for (const EdgeCoef& ec : coef)
    if (ec.edge == edge) return &ec;
  return nullptr;
}

long double EigenMode::eval(int edge, long double x) const {
  const EdgeCoef* ec = find(edge);
  if (!ec) return 0;
  return static_cast<long double>(ec->a) * std::cos(omega * x) +
         static_cast<long double>(ec->b) * std::sin(omega * x);
}

long double EigenMode::deriv(int edge, long double x) const {
  const EdgeCoef* ec = find(edge);
  if (!ec) return 0;
  return omega * (-static_cast<long double>(ec->a) * std::sin(omega * x) +
                  static_cast<long double>(ec->b) * std::cos(omega * x));
}

SpectralBasis::SpectralBasis(MetricGraph graph, std::vector<EigenMode> modes)
    : graph_(std::move(graph)), modes_(std::move(modes)) {
  for (size_t i = 0; i < modes_.size(); ++i) {
    EigenMode& md = modes_[i];
    md.k = static_cast<int>(i) + 1;
    if (i > 0 && !(modes_[i - 1].mu < md.mu))
      throw Error("eigenvalues must be strictly increasing after merge (tie at index " +
                  std::to_string(i + 1) + ")");
    if (md.coef.empty()) throw Error("mode without support");
    for (const EdgeCoef& ec : md.coef) {
      const Edge& e = graph_.edge(ec.edge);
      if (e.unbounded())
        throw Error("mode " + std::to_string(md.k) + " supported on unbounded edge " + e.id);
    }
  }
}

const EigenMode& SpectralBasis::mode(int k) const {
  if (k < 1 || k > size()) throw Error("mode index out of range: " + std::to_string(k));
  return modes_[static_cast<size_t>(k - 1)];
}

std::vector<double> SpectralBasis::eigenvalues() const {
  std::vector<double> mu;
  mu.reserve(modes_.size());
  for (const EigenMode& md : modes_) mu.push_back(md.mu);
  return mu;
}

std::vector<int> SpectralBasis::support_union() const {
  std::vector<int> edges;
  for (const EigenMode& md : modes_)
    for (const EdgeCoef& ec : md.coef)
      if (std::find(edges.begin(), edges.end(), ec.edge) == edges.end())
        edges.push_back(ec.edge);
  std::sort(edges.begin(), edges.end());
  return edges;
}

SpectralBasis tadpole_basis(int n_modes) {
  if (n_modes < 1) throw Error("n_modes must be >= 1");
  MetricGraph g = tadpole_graph();
  const int head = g.edge_index("head");
  std::vector<EigenMode> modes(static_cast<size_t>(n_modes));
  for (int k = 1; k <= n_modes; ++k) {
    EigenMode& md = modes[static_cast<size_t>(k - 1)];
    md.omega = 2 * static_cast<long double>(k) * kPiL;
    md.mu = static_cast<double>(md.omega * md.omega);
    md.coef = {{head, 0.0, std::sqrt(2.0)}};
    md.m = k;
  }
  return SpectralBasis(std::move(g), std::move(modes));
}

SpectralBasis star_pair_basis(const std::vector<double>& lengths, int modes_per_length) {
  if (modes_per_length < 1) throw Error("modes_per_length must be >= 1");
  MetricGraph g = star_graph(lengths);
  std::vector<EigenMode> modes;
  modes.reserve(lengths.size() * static_cast<size_t>(modes_per_length));
  for (size_t l = 0; l < lengths.size(); ++l) {
    const long double L = lengths[l];
    const double amp = 1.0 / std::sqrt(lengths[l]);
    const int e1 = static_cast<int>(2 * l), e2 = e1 + 1;
    for (int m = 1; m <= modes_per_length; ++m) {
      EigenMode md;
      md.omega = static_cast<long double>(m) * kPiL / L;
      md.mu = static_cast<double>(md.omega * md.omega);
      md.coef = {{e1, 0.0, amp}, {e2, 0.0, -amp}};
      md.m = m;
      md.length_class = static_cast<int>(l) + 1;
      modes.push_back(std::move(md));
    }
  }
  std::sort(modes.begin(), modes.end(),
            [](const EigenMode& p, const EigenMode& q) { return p.mu < q.mu; });
  for (size_t i = 1; i < modes.size(); ++i) {
    const double gap = modes[i].mu - modes[i - 1].mu;
    if (gap <= 1e-9 * modes.back().mu)
      throw Error("resonant edge lengths: eigenvalue collision between class " +
                  std::to_string(modes[i - 1].length_class) + " mode " +
                  std::to_string(modes[i - 1].m) + " and class " +
                  std::to_string(modes[i].length_class) + " mode " + std::to_string(modes[i].m));
  }
  return SpectralBasis(std::move(g), std::move(modes));
}

SpectralBasis uniform_chain_basis(double length, ChainClass cls, int n_modes) {
  if (n_modes < 1) throw Error("n_modes must be >= 1");
  if (!(length > 0) || !std::isfinite(length)) throw Error("chain length must be positive and finite");
  MetricGraph g = chain_graph(length, cls);
  const int e1 = g.edge_index("e1"), e2 = g.edge_index("e2");
  const long double L = length;
  const double amp = 1.0 / std::sqrt(length);
  std::vector<EigenMode> modes(static_cast<size_t>(n_modes));
  for (int k = 1; k <= n_modes; ++k) {
    EigenMode& md = modes[static_cast<size_t>(k - 1)];
    md.m = k;
    switch (cls) {
      case ChainClass::NeumannAntisymmetric:
        md.omega = (2 * static_cast<long double>(k) - 1) * kPiL / (2 * L);
        md.coef = {{e1, amp, 0.0}, {e2, -amp, 0.0}};
        break;
      case ChainClass::Dirichlet:
        md.omega = static_cast<long double>(k) * kPiL / L;
        md.coef = {{e1, 0.0, amp}, {e2, 0.0, -amp}};
        break;
      case ChainClass::NeumannSymmetric:
        md.omega = (2 * static_cast<long double>(k) - 1) * kPiL / L;
        md.coef = {{e1, amp, 0.0}, {e2, amp, 0.0}};
        break;
    }
    md.mu = static_cast<double>(md.omega * md.omega);
  }
  return SpectralBasis(std::move(g), std::move(modes));
}

// ---- verification ----------------------------------------------------------

Eigen::MatrixXd gram_matrix(const SpectralBasis& basis, int N) {
  if (N < 1 || N > basis.size()) throw Error("gram_matrix: N out of range");
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  for (int j = 1; j <= N; ++j) {
    for (int k = j; k <= N; ++k) {
      const EigenMode& mj = basis.mode(j);
      const EigenMode& mk = basis.mode(k);
      long double acc = 0;
      for (const EdgeCoef& ec : mj.coef) {
        if (!mk.supports(ec.edge)) continue;
        const double len = basis.graph().edge(ec.edge).length;
        const auto& rule = GaussLegendre::cached(
            oscillatory_order(static_cast<double>(mj.omega + mk.omega), len));
        acc += rule.integrate(0, len, [&](long double x) {
          return mj.eval(ec.edge, x) * mk.eval(ec.edge, x);
        });
      }
      G(j - 1, k - 1) = static_cast<double>(acc);
      G(k - 1, j - 1) = G(j - 1, k - 1);
    }
  }
  return G;
}

double BoundaryResidual::worst() const {
  return std::max(std::max(max_dirichlet, max_neumann),
                  std::max(max_continuity, max_kirchhoff));
}

BoundaryResidual check_mode_boundaries(const SpectralBasis& basis, int N) {
  if (N < 1 || N > basis.size()) throw Error("check_mode_boundaries: N out of range");
  const MetricGraph& g = basis.graph();
  BoundaryResidual r;
  for (int k = 1; k <= N; ++k) {
    const EigenMode& md = basis.mode(k);
    for (size_t vi = 0; vi < g.vertices().size(); ++vi) {
      const Vertex& v = g.vertex(static_cast<int>(vi));
      // Collect the mode's value and outgoing derivative at v from every
      // incident edge endpoint; unsupported edges contribute zeros, which is
      // exactly the extension the continuity condition must survive.
      std::vector<double> values;
      double dsum = 0;
      for (size_t ei = 0; ei < g.edges().size(); ++ei) {
        const Edge& e = g.edge(static_cast<int>(ei));
        if (e.v_from == static_cast<int>(vi)) {
          values.push_back(static_cast<double>(md.eval(static_cast<int>(ei), 0)));
          dsum += static_cast<double>(md.deriv(static_cast<int>(ei), 0));
        }
        if (!e.unbounded() && e.v_to == static_cast<int>(vi)) {
          values.push_back(static_cast<double>(md.eval(static_cast<int>(ei), e.length)));
          dsum -= static_cast<double>(md.deriv(static_cast<int>(ei), e.length));
        }
      }
      if (values.empty()) continue;
      switch (v.bc) {
        case BoundaryKind::Dirichlet:
          for (double val : values) r.max_dirichlet = std::max(r.max_dirichlet, std::fabs(val));
          break;
        case BoundaryKind::Neumann:
          r.max_neumann = std::max(r.max_neumann, std::fabs(dsum));
          break;
        case BoundaryKind::NeumannKirchhoff: {
          const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
          r.max_continuity = std::max(r.max_continuity, *hi - *lo);
          r.max_kirchhoff = std::max(r.max_kirchhoff, std::fabs(dsum));
          break;
        }
      }
    }
  }
  return r;
}

// ---- states ----------------------------------------------------------------

double hs_norm(const Eigen::VectorXcd& c, double s) {
  if (s < 0) throw Error("hs_norm: s must be >= 0");
  long double acc = 0;
  for (int k = 0; k < c.size(); ++k) {
    const long double w = std::pow(static_cast<long double>(k + 1), static_cast<long double>(s));
    acc += w * w * static_cast<long double>(std::norm(c[k]));
  }
  return static_cast<double>(std::sqrt(acc));
}

double hs_norm(const QuantumState& state, double s) { return hs_norm(state.c, s); }

}  // namespace qgc
