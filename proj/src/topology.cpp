#include "pergraph/topology.hpp"

#include <map>

#include "pergraph/errors.hpp"

namespace pergraph {

const char* to_string(TopologyClass::Kind k) noexcept {
  switch (k) {
    case TopologyClass::Kind::HPer: return "HPer";
    case TopologyClass::Kind::TerminalEdge: return "TerminalEdge";
    case TopologyClass::Kind::Neither: return "Neither";
  }
  return "?";
}

std::optional<EdgeIndex> has_terminal_edge(const PeriodicSpec& s) {
  const TruncatedGraph t = build_truncation(s, 1);
  for (EdgeIndex o = 0; o < s.cell.edge_count(); ++o) {
    const Edge& e = t.graph.edge(t.edge_of(0, o));
    if (degree(t.graph, e.v) == 1 || degree(t.graph, e.w) == 1) return o;
  }
  return std::nullopt;
}

namespace {

// For every cell-0 edge, the compact component its deletion leaves behind (empty if none).
std::vector<std::vector<std::string>> detached_pieces(const PeriodicSpec& s, int width) {
  const TruncatedGraph t = build_truncation(s, width);
  std::vector<std::vector<std::string>> out(s.cell.edge_count());
  std::vector<bool> removed(t.graph.edge_count(), false);
  for (EdgeIndex o = 0; o < s.cell.edge_count(); ++o) {
    const EdgeIndex e = t.edge_of(0, o);
    removed[e] = true;
    const Components c = components(t.graph, removed);
    removed[e] = false;
    std::vector<bool> open(c.count, false);
    for (VertexIndex v = 0; v < t.graph.vertex_count(); ++v) {
      if (t.boundary[v]) open[c.vertexComponent[v]] = true;
    }
    for (std::size_t k = 0; k < c.count && out[o].empty(); ++k) {
      if (open[k]) continue;
      for (VertexIndex v = 0; v < t.graph.vertex_count(); ++v) {
        if (c.vertexComponent[v] == k) out[o].push_back(t.graph.vertex_label(v));
      }
    }
  }
  return out;
}

struct Stabilized {
  std::vector<std::vector<std::string>> pieces;
  int width = 0;
};

Stabilized stabilized_pieces(const PeriodicSpec& s, int maxWidth) {
  require_valid(s);
  int width = 3;
  auto previous = detached_pieces(s, width);
  while (true) {
    const int next = 2 * width;
    if (next > maxWidth) {
      throw InconclusiveError("compact-component test did not stabilize up to width " +
                              std::to_string(maxWidth));
    }
    auto current = detached_pieces(s, next);
    bool same = true;
    for (std::size_t o = 0; o < current.size(); ++o) {
      same = same && (current[o].empty() == previous[o].empty());
    }
    if (same) return {std::move(current), next};
    previous = std::move(current);
    width = next;
  }
}

}  // namespace

HPerVerdict satisfies_h_per(const PeriodicSpec& s, int maxWidth) {
  const Stabilized st = stabilized_pieces(s, maxWidth);
  HPerVerdict verdict;
  verdict.width = st.width;
  for (EdgeIndex o = 0; o < st.pieces.size(); ++o) {
    if (!st.pieces[o].empty()) {
      verdict.satisfied = false;
      verdict.edge = o;
      verdict.component = st.pieces[o];
      break;
    }
  }
  return verdict;
}

std::vector<EdgeIndex> cut_edge_set(const PeriodicSpec& s, int maxWidth) {
  const Stabilized st = stabilized_pieces(s, maxWidth);
  std::vector<EdgeIndex> out;
  for (EdgeIndex o = 0; o < st.pieces.size(); ++o) {
    if (!st.pieces[o].empty()) out.push_back(o);
  }
  return out;
}

TopologyClass classify(const PeriodicSpec& s, int maxWidth) {
  TopologyClass c;
  if (const auto terminal = has_terminal_edge(s)) {
    c.kind = TopologyClass::Kind::TerminalEdge;
    c.terminalEdge = terminal;
    return c;
  }
  c.cutEdges = cut_edge_set(s, maxWidth);
  c.kind = c.cutEdges.empty() ? TopologyClass::Kind::HPer : TopologyClass::Kind::Neither;
  return c;
}

std::pair<std::shared_ptr<const TruncatedGraph>, GraphFunction> double_cut_edges(
    const GraphFunction& u, const std::set<EdgeIndex>& orbits) {
  const Mesh& mesh = *u.mesh;
  const TruncatedGraph& t = mesh.owner();
  for (EdgeIndex o : orbits) {
    if (o >= t.cellEdgeCount) throw InputError("double_cut_edges: " + std::to_string(o) + " is not a cell edge");
  }
  if (orbits.empty()) return {mesh.owner_ptr(), u};

  auto out = std::make_shared<TruncatedGraph>();
  out->N = t.N;
  out->firstCell = t.firstCell;
  out->lastCell = t.lastCell;
  out->cellVertexCount = t.cellVertexCount;
  out->cellEdgeCount = t.cellEdgeCount + orbits.size();
  out->vertexCell = t.vertexCell;
  out->mergeMap = t.mergeMap;
  out->boundary = t.boundary;
  for (VertexIndex v = 0; v < t.graph.vertex_count(); ++v) out->graph.add_vertex(t.graph.vertex_label(v));

  std::map<EdgeIndex, EdgeIndex> newOrbit;
  EdgeIndex next = 0;
  for (EdgeIndex o = 0; o < t.cellEdgeCount; ++o) {
    newOrbit[o] = next;
    next += orbits.count(o) ? 2 : 1;
  }
  std::vector<std::size_t> counts;
  std::vector<std::pair<EdgeIndex, EdgeIndex>> source;  // (old edge, new edge)
  for (EdgeIndex e = 0; e < t.graph.edge_count(); ++e) {
    const Edge& ed = t.graph.edge(e);
    const EdgeIndex o = t.edgeOrbit[e];
    const int copies = orbits.count(o) ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
      const std::string id = copies == 1 ? ed.id : ed.id + "#" + std::to_string(c + 1);
      const EdgeIndex ne = out->graph.add_edge(id, ed.v, ed.w, copies == 1 ? ed.length : 2.0 * ed.length);
      out->edgeCell.push_back(t.edgeCell[e]);
      out->edgeOrbit.push_back(newOrbit[o] + static_cast<EdgeIndex>(c));
      counts.push_back(mesh.nodes_on_edge(e));
      source.emplace_back(e, ne);
    }
  }
  std::shared_ptr<const TruncatedGraph> graph = out;
  auto newMesh = std::make_shared<const Mesh>(graph, counts);
  GraphFunction v = zero_function(newMesh);
  for (VertexIndex k = 0; k < t.graph.vertex_count(); ++k) v.values[static_cast<Eigen::Index>(k)] = u.values[static_cast<Eigen::Index>(k)];
  for (const auto& [oldE, newE] : source) {
    for (std::size_t j = 1; j + 1 < counts[newE]; ++j) {
      v.values[static_cast<Eigen::Index>(newMesh->node(newE, j))] =
          u.values[static_cast<Eigen::Index>(mesh.node(oldE, j))];
    }
  }
  return {graph, v};
}

}  // namespace pergraph
