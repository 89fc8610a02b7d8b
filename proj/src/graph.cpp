#include "qgc/graph.hpp"

#include <cmath>

#include "qgc/config.hpp"
#include "qgc/core.hpp"
#include "qgc/expression.hpp"

namespace qgc {

namespace {

std::vector<std::string> split_fields(const std::string& raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t comma = raw.find(',', start);
    if (comma == std::string::npos) comma = raw.size();
    std::size_t a = start, b = comma;
    while (a < b && std::isspace(static_cast<unsigned char>(raw[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(raw[b - 1]))) --b;
    out.push_back(raw.substr(a, b - a));
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view boundary_name(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::NeumannKirchhoff: return "neumann_kirchhoff";
  }
  return "?";
}

BoundaryKind boundary_from_name(std::string_view name) {
  if (name == "dirichlet" || name == "D") return BoundaryKind::Dirichlet;
  if (name == "neumann" || name == "N") return BoundaryKind::Neumann;
  if (name == "neumann_kirchhoff" || name == "nk" || name == "NK")
    return BoundaryKind::NeumannKirchhoff;
  throw Error("unknown boundary kind: " + std::string(name));
}

MetricGraph MetricGraph::build(const GraphSpec& spec) {
  MetricGraph g;
  g.vertices_.reserve(spec.vertices.size());
  for (const std::string& id : spec.vertices) {
    for (const Vertex& v : g.vertices_)
      if (v.id == id) throw Error("duplicate vertex id: " + id);
    Vertex v;
    v.id = id;
    const auto it = spec.boundary.find(id);
    if (it == spec.boundary.end()) throw Error("vertex without boundary condition: " + id);
    v.bc = it->second;
    g.vertices_.push_back(std::move(v));
  }
  for (const auto& [id, bc] : spec.boundary) {
    (void)bc;
    bool known = false;
    for (const Vertex& v : g.vertices_) known = known || v.id == id;
    if (!known) throw Error("boundary condition for unknown vertex: " + id);
  }

  g.edges_.reserve(spec.edges.size());
  for (const EdgeSpec& es : spec.edges) {
    for (const Edge& e : g.edges_)
      if (e.id == es.id) throw Error("duplicate edge id: " + es.id);
    if (!(es.length > 0)) throw Error("edge " + es.id + " has nonpositive length");
    Edge e;
    e.id = es.id;
    e.length = es.length;
    e.v_from = g.vertex_index(es.from);
    if (e.unbounded()) {
      if (!es.to.empty())
        throw Error("unbounded edge " + es.id + " must leave its far end open");
    } else {
      if (es.to.empty()) throw Error("finite edge " + es.id + " is missing its far endpoint");
      e.v_to = g.vertex_index(es.to);
    }
    g.vertices_[static_cast<size_t>(e.v_from)].degree += 1;
    if (e.v_to >= 0) g.vertices_[static_cast<size_t>(e.v_to)].degree += 1;
    g.edges_.push_back(std::move(e));
  }

  for (const Vertex& v : g.vertices_) {
    if (v.degree == 0) throw Error("isolated vertex: " + v.id);
    if (v.external() && v.bc == BoundaryKind::NeumannKirchhoff)
      throw Error("Neumann-Kirchhoff condition on external vertex " + v.id);
    if (!v.external() && v.bc != BoundaryKind::NeumannKirchhoff)
      throw Error("point condition on internal vertex " + v.id +
                  " (degree >= 2 requires Neumann-Kirchhoff)");
  }
  return g;
}

int MetricGraph::edge_index(std::string_view id) const {
  for (size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].id == id) return static_cast<int>(i);
  throw Error("unknown edge: " + std::string(id));
}

int MetricGraph::vertex_index(std::string_view id) const {
  for (size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].id == id) return static_cast<int>(i);
  throw Error("unknown vertex: " + std::string(id));
}

MetricGraph graph_from_config(const Config& cfg) {
  GraphSpec spec;
  spec.vertices = cfg.section_keys("vertices");
  if (spec.vertices.empty())
    throw ConfigError(cfg.origin() + ": graph needs a [vertices] section");
  for (const std::string& id : cfg.section_keys("boundary")) {
    const std::string kind = cfg.get_string("boundary." + id);
    try {
      spec.boundary[id] = boundary_from_name(kind);
    } catch (const Error& e) {
      throw ConfigError(cfg.origin() + ": vertex '" + id + "': " + e.what());
    }
  }
  const std::vector<std::string> edge_ids = cfg.section_keys("edges");
  if (edge_ids.empty()) throw ConfigError(cfg.origin() + ": graph needs an [edges] section");
  for (const std::string& id : edge_ids) {
    const std::vector<std::string> f = split_fields(cfg.get_string("edges." + id));
    EdgeSpec es;
    es.id = id;
    std::string length;
    if (f.size() == 2) {                 // from, inf
      es.from = f[0];
      length = f[1];
    } else if (f.size() == 3) {          // from, to, length
      es.from = f[0];
      es.to = f[1];
      length = f[2];
    } else {
      throw ConfigError(cfg.origin() + ": edge '" + id +
                        "' needs \"from, to, length\" or \"from, inf\"");
    }
    if (length == "inf" || length == "infinity") {
      es.length = std::numeric_limits<double>::infinity();
    } else {
      try {
        es.length = eval_constant(length);
      } catch (const Error& e) {
        throw ConfigError(cfg.origin() + ": edge '" + id + "' length: " + e.what());
      }
    }
    if (f.size() == 2 && std::isfinite(es.length))
      throw ConfigError(cfg.origin() + ": finite edge '" + id + "' is missing its far endpoint");
    spec.edges.push_back(std::move(es));
  }
  try {
    return MetricGraph::build(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
}

MetricGraph tadpole_graph() {
  GraphSpec s;
  s.vertices = {"v"};
  s.boundary = {{"v", BoundaryKind::NeumannKirchhoff}};
  s.edges.push_back({"head", 1.0, "v", "v"});
  s.edges.push_back({"tail", std::numeric_limits<double>::infinity(), "v", ""});
  return MetricGraph::build(s);
}

MetricGraph star_graph(const std::vector<double>& lengths) {
  if (lengths.empty()) throw Error("star graph needs at least one edge-pair length");
  GraphSpec s;
  s.vertices.push_back("c");
  s.boundary["c"] = BoundaryKind::NeumannKirchhoff;
  for (size_t l = 0; l < lengths.size(); ++l) {
    for (int side = 1; side <= 2; ++side) {
      const std::string tip = "w" + std::to_string(2 * l + static_cast<size_t>(side));
      s.vertices.push_back(tip);
      s.boundary[tip] = BoundaryKind::Dirichlet;
      // Edges run from the centre, so pair modes share one coordinate frame.
      s.edges.push_back({"e" + std::to_string(2 * l + static_cast<size_t>(side)),
                         lengths[l], "c", tip});
    }
  }
  return MetricGraph::build(s);
}

std::string_view chain_class_name(ChainClass c) {
  switch (c) {
    case ChainClass::NeumannAntisymmetric: return "neumann_antisym";
    case ChainClass::Dirichlet: return "dirichlet";
    case ChainClass::NeumannSymmetric: return "neumann_sym";
  }
  return "?";
}

ChainClass chain_class_from_name(std::string_view name) {
  if (name == "neumann_antisym") return ChainClass::NeumannAntisymmetric;
  if (name == "dirichlet") return ChainClass::Dirichlet;
  if (name == "neumann_sym") return ChainClass::NeumannSymmetric;
  throw Error("unknown chain class: " + std::string(name));
}

MetricGraph chain_graph(double length, ChainClass cls) {
  const BoundaryKind end = cls == ChainClass::Dirichlet ? BoundaryKind::Dirichlet
                                                        : BoundaryKind::Neumann;
  GraphSpec s;
  s.vertices = {"a", "c", "b"};
  s.boundary = {{"a", end}, {"c", BoundaryKind::NeumannKirchhoff}, {"b", end}};
  // Both edges run from their external vertex toward the middle.
  s.edges.push_back({"e1", length, "a", "c"});
  s.edges.push_back({"e2", length, "b", "c"});
  return MetricGraph::build(s);
}

}  // namespace qgc
