#pragma once

// Metric graphs: edges are intervals [0, L] (L may be infinite), vertices carry
// self-adjoint boundary conditions. Immutable after construction.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qgc {

enum class BoundaryKind { Dirichlet, Neumann, NeumannKirchhoff };

std::string_view boundary_name(BoundaryKind k);
BoundaryKind boundary_from_name(std::string_view name);

struct EdgeSpec {
  std::string id;
  double length = 0;        // +infinity for unbounded edges
  std::string from;         // vertex at coordinate 0
  std::string to;           // vertex at coordinate L; empty for unbounded edges
};

struct GraphSpec {
  std::vector<EdgeSpec> edges;
  std::vector<std::string> vertices;
  std::map<std::string, BoundaryKind> boundary;
};

struct Edge {
  std::string id;
  double length = 0;
  int v_from = -1;
  int v_to = -1;            // -1 for the open end of an unbounded edge
  bool unbounded() const { return !std::isfinite(length); }
  bool self_loop() const { return v_to >= 0 && v_to == v_from; }
};

struct Vertex {
  std::string id;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  int degree = 0;           // self-loops count twice
  bool external() const { return degree == 1; }
};

class MetricGraph {
 public:
  // Validates the spec: positive lengths, resolvable endpoint references,
  // Dirichlet/Neumann only on degree-1 vertices, Neumann-Kirchhoff only on
  // internal ones. Throws qgc::Error on violations.
  static MetricGraph build(const GraphSpec& spec);

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Edge& edge(int i) const { return edges_.at(static_cast<size_t>(i)); }
  const Vertex& vertex(int i) const { return vertices_.at(static_cast<size_t>(i)); }

  int edge_index(std::string_view id) const;      // throws if absent
  int vertex_index(std::string_view id) const;

 private:
  std::vector<Edge> edges_;
  std::vector<Vertex> vertices_;
};

class Config;

// Builds a graph from config sections: [vertices] declares ids (values are
// free-form labels), [boundary] assigns each a condition by name, and [edges]
// holds "id = from, to, length" lines whose lengths accept exact expressions
// ("cbrt(2)", "pi"); "id = from, inf" anchors an unbounded edge. Edges and
// vertices are indexed in declaration order.
MetricGraph graph_from_config(const Config& cfg);

// The worked graph families.
MetricGraph tadpole_graph();                                   // unit loop + unbounded tail
MetricGraph star_graph(const std::vector<double>& lengths);    // one edge pair per length

enum class ChainClass {
  NeumannAntisymmetric,  // Neumann ends, modes split oddly about the middle
  Dirichlet,             // Dirichlet ends
  NeumannSymmetric,      // Neumann ends, modes even about the middle
};

std::string_view chain_class_name(ChainClass c);
ChainClass chain_class_from_name(std::string_view name);

MetricGraph chain_graph(double length, ChainClass cls);        // two equal edges, three vertices

}  // namespace qgc
