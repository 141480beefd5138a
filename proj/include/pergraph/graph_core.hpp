#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pergraph {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

/// \brief Edge of a metric graph; the orientation v -> w fixes the coordinate.
struct Edge {
  std::string id;
  VertexIndex v = 0;
  VertexIndex w = 0;
  double length = 0.0;

  bool is_loop() const noexcept { return v == w; }
};

/// \brief A point of a metric graph, given by an edge and a coordinate on it.
struct GraphPoint {
  EdgeIndex edge = 0;
  double coordinate = 0.0;
};

/// \brief Finite metric multigraph. Self-loops and parallel edges are allowed.
///
/// Vertices and edges are addressed by dense indices; labels and ids are kept
/// for I/O and must be unique.
class CompactGraph {
 public:
  VertexIndex add_vertex(const std::string& label);
  EdgeIndex add_edge(const std::string& id, VertexIndex v, VertexIndex w, double length);

  std::size_t vertex_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& vertex_label(VertexIndex v) const { return labels_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Edges incident to v. A self-loop appears twice.
  const std::vector<EdgeIndex>& incident(VertexIndex v) const { return incident_.at(v); }

  std::optional<VertexIndex> find_vertex(const std::string& label) const;
  std::optional<EdgeIndex> find_edge(const std::string& id) const;

  double total_length() const noexcept;

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeIndex>> incident_;
  std::unordered_map<std::string, VertexIndex> vertexByLabel_;
  std::unordered_map<std::string, EdgeIndex> edgeById_;
};

/// \brief Number of edge endpoints at v; a self-loop counts twice.
std::size_t degree(const CompactGraph& g, VertexIndex v);
std::size_t degree(const CompactGraph& g, const std::string& label);

struct Components {
  std::size_t count = 0;
  std::vector<std::size_t> vertexComponent;
  /// Component of every edge; removed edges get npos.
  std::vector<std::size_t> edgeComponent;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

Components components(const CompactGraph& g);

/// \brief Components of g with the edges flagged in \p removed deleted.
Components components(const CompactGraph& g, const std::vector<bool>& removed);

struct GraphIsomorphism {
  std::vector<VertexIndex> vertexMap;
  std::vector<EdgeIndex> edgeMap;
};

/// \brief Length-preserving isomorphism search by exhaustive backtracking.
std::optional<GraphIsomorphism> graphs_equal(const CompactGraph& g1, const CompactGraph& g2,
                                             double tol = 1e-9);

}  // namespace pergraph
