#include "pergraph/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "pergraph/errors.hpp"

namespace pergraph {

VertexIndex CompactGraph::add_vertex(const std::string& label) {
  if (vertexByLabel_.count(label) != 0) {
    throw InputError("duplicate vertex label '" + label + "'");
  }
  const VertexIndex v = labels_.size();
  labels_.push_back(label);
  incident_.emplace_back();
  vertexByLabel_.emplace(label, v);
  return v;
}

EdgeIndex CompactGraph::add_edge(const std::string& id, VertexIndex v, VertexIndex w,
                                 double length) {
  if (edgeById_.count(id) != 0) {
    throw InputError("duplicate edge id '" + id + "'");
  }
  if (v >= labels_.size() || w >= labels_.size()) {
    throw InputError("edge '" + id + "' has an endpoint outside the vertex set");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InputError("edge '" + id + "' must have finite positive length");
  }
  const EdgeIndex e = edges_.size();
  edges_.push_back(Edge{id, v, w, length});
  incident_[v].push_back(e);
  incident_[w].push_back(e);
  edgeById_.emplace(id, e);
  return e;
}

std::optional<VertexIndex> CompactGraph::find_vertex(const std::string& label) const {
  const auto it = vertexByLabel_.find(label);
  if (it == vertexByLabel_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> CompactGraph::find_edge(const std::string& id) const {
  const auto it = edgeById_.find(id);
  if (it == edgeById_.end()) return std::nullopt;
  return it->second;
}

double CompactGraph::total_length() const noexcept {
  double sum = 0.0;
  for (const Edge& e : edges_) sum += e.length;
  return sum;
}

std::size_t degree(const CompactGraph& g, VertexIndex v) {
  if (v >= g.vertex_count()) throw InputError("unknown vertex index " + std::to_string(v));
  return g.incident(v).size();
}

std::size_t degree(const CompactGraph& g, const std::string& label) {
  const auto v = g.find_vertex(label);
  if (!v) throw InputError("unknown vertex '" + label + "'");
  return degree(g, *v);
}

Components components(const CompactGraph& g) {
  return components(g, std::vector<bool>(g.edge_count(), false));
}

Components components(const CompactGraph& g, const std::vector<bool>& removed) {
  Components c;
  c.vertexComponent.assign(g.vertex_count(), Components::npos);
  c.edgeComponent.assign(g.edge_count(), Components::npos);
  std::vector<VertexIndex> stack;
  for (VertexIndex root = 0; root < g.vertex_count(); ++root) {
    if (c.vertexComponent[root] != Components::npos) continue;
    const std::size_t id = c.count++;
    c.vertexComponent[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const VertexIndex v = stack.back();
      stack.pop_back();
      for (EdgeIndex e : g.incident(v)) {
        if (removed[e]) continue;
        c.edgeComponent[e] = id;
        const Edge& ed = g.edge(e);
        const VertexIndex other = ed.v == v ? ed.w : ed.v;
        if (c.vertexComponent[other] == Components::npos) {
          c.vertexComponent[other] = id;
          stack.push_back(other);
        }
      }
    }
  }
  return c;
}

namespace {

bool lengths_match(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

// Per-graph data used by the isomorphism search.
struct IsoIndex {
  // neighbour -> edges joining the pair, sorted by length (loops keyed by the vertex itself)
  std::vector<std::map<VertexIndex, std::vector<EdgeIndex>>> buckets;
  std::vector<std::map<VertexIndex, std::vector<double>>> bucketLengths;
  std::vector<std::vector<double>> incidentLengths;
  std::vector<std::size_t> loops;

  explicit IsoIndex(const CompactGraph& g)
      : buckets(g.vertex_count()),
        bucketLengths(g.vertex_count()),
        incidentLengths(g.vertex_count()),
        loops(g.vertex_count(), 0) {
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      const Edge& ed = g.edge(e);
      buckets[ed.v][ed.w].push_back(e);
      if (ed.is_loop()) {
        ++loops[ed.v];
      } else {
        buckets[ed.w][ed.v].push_back(e);
      }
      incidentLengths[ed.v].push_back(ed.length);
      incidentLengths[ed.w].push_back(ed.length);
    }
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      std::sort(incidentLengths[v].begin(), incidentLengths[v].end());
      for (auto& [nb, list] : buckets[v]) {
        std::sort(list.begin(), list.end(), [&g](EdgeIndex a, EdgeIndex b) {
          return g.edge(a).length < g.edge(b).length;
        });
        auto& lens = bucketLengths[v][nb];
        for (EdgeIndex e : list) lens.push_back(g.edge(e).length);
      }
    }
  }
};

class IsoSearch {
 public:
  IsoSearch(const CompactGraph& g1, const CompactGraph& g2, double tol)
      : g1_(g1), g2_(g2), tol_(tol), a_(g1), b_(g2) {}

  std::optional<GraphIsomorphism> run() {
    const std::size_t n = g1_.vertex_count();
    compatible_.assign(n, {});
    for (VertexIndex u = 0; u < n; ++u) {
      for (VertexIndex x = 0; x < n; ++x) {
        if (a_.loops[u] == b_.loops[x] &&
            lengths_match(a_.incidentLengths[u], b_.incidentLengths[x], tol_)) {
          compatible_[u].push_back(x);
        }
      }
      if (compatible_[u].empty()) return std::nullopt;
    }
    build_order();
    forward_.assign(n, kNone);
    backward_.assign(n, kNone);
    if (!extend(0)) return std::nullopt;

    GraphIsomorphism iso;
    iso.vertexMap = forward_;
    iso.edgeMap.assign(g1_.edge_count(), kNone);
    for (VertexIndex u = 0; u < n; ++u) {
      for (const auto& [nb, list] : a_.buckets[u]) {
        if (nb < u) continue;
        const auto& image = b_.buckets[forward_[u]].at(forward_[nb]);
        for (std::size_t i = 0; i < list.size(); ++i) iso.edgeMap[list[i]] = image[i];
      }
    }
    return iso;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void build_order() {
    const std::size_t n = g1_.vertex_count();
    std::vector<bool> seen(n, false);
    parent_.assign(n, kNone);
    std::vector<VertexIndex> roots(n);
    for (VertexIndex v = 0; v < n; ++v) roots[v] = v;
    // Rarest signature first keeps the branching factor small.
    std::stable_sort(roots.begin(), roots.end(), [this](VertexIndex a, VertexIndex b) {
      return compatible_[a].size() < compatible_[b].size();
    });
    for (VertexIndex root : roots) {
      if (seen[root]) continue;
      std::queue<VertexIndex> queue;
      queue.push(root);
      seen[root] = true;
      while (!queue.empty()) {
        const VertexIndex v = queue.front();
        queue.pop();
        order_.push_back(v);
        for (const auto& [nb, list] : a_.buckets[v]) {
          if (!seen[nb]) {
            seen[nb] = true;
            parent_[nb] = v;
            queue.push(nb);
          }
        }
      }
    }
  }

  bool consistent(VertexIndex u, VertexIndex x) const {
    for (const auto& [nb, lens] : a_.bucketLengths[u]) {
      const VertexIndex image = nb == u ? x : forward_[nb];
      if (image == kNone) continue;
      const auto it = b_.bucketLengths[x].find(image);
      if (it == b_.bucketLengths[x].end() || !lengths_match(lens, it->second, tol_)) return false;
    }
    for (const auto& [nb, lens] : b_.bucketLengths[x]) {
      const VertexIndex pre = nb == x ? u : backward_[nb];
      if (pre == kNone) continue;
      if (a_.bucketLengths[u].count(pre) == 0) return false;
    }
    return true;
  }

  bool try_candidate(std::size_t k, VertexIndex u, VertexIndex x) {
    if (backward_[x] != kNone) return false;
    if (!std::binary_search(compatible_[u].begin(), compatible_[u].end(), x)) return false;
    if (!consistent(u, x)) return false;
    forward_[u] = x;
    backward_[x] = u;
    if (extend(k + 1)) return true;
    forward_[u] = kNone;
    backward_[x] = kNone;
    return false;
  }

  bool extend(std::size_t k) {
    if (k == order_.size()) return true;
    const VertexIndex u = order_[k];
    if (parent_[u] != kNone) {
      for (const auto& [x, list] : b_.buckets[forward_[parent_[u]]]) {
        if (try_candidate(k, u, x)) return true;
      }
      return false;
    }
    for (VertexIndex x : compatible_[u]) {
      if (try_candidate(k, u, x)) return true;
    }
    return false;
  }

  const CompactGraph& g1_;
  const CompactGraph& g2_;
  double tol_;
  IsoIndex a_;
  IsoIndex b_;
  std::vector<std::vector<VertexIndex>> compatible_;
  std::vector<VertexIndex> order_;
  std::vector<VertexIndex> parent_;
  std::vector<VertexIndex> forward_;
  std::vector<VertexIndex> backward_;
};

}  // namespace

std::optional<GraphIsomorphism> graphs_equal(const CompactGraph& g1, const CompactGraph& g2,
                                             double tol) {
  if (tol < 0.0) throw InputError("graphs_equal: negative tolerance");
  if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) {
    return std::nullopt;
  }
  std::vector<double> l1, l2;
  for (const Edge& e : g1.edges()) l1.push_back(e.length);
  for (const Edge& e : g2.edges()) l2.push_back(e.length);
  std::sort(l1.begin(), l1.end());
  std::sort(l2.begin(), l2.end());
  if (!lengths_match(l1, l2, tol)) return std::nullopt;
  return IsoSearch(g1, g2, tol).run();
}

}  // namespace pergraph
