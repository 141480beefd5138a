#include "pergraph/periodic_builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "pergraph/errors.hpp"

namespace pergraph {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string label_list(const CompactGraph& g, const std::vector<VertexIndex>& vs) {
  std::string out;
  for (VertexIndex v : vs) {
    if (!out.empty()) out += ", ";
    out += v < g.vertex_count() ? g.vertex_label(v) : "#" + std::to_string(v);
  }
  return out;
}

std::optional<WitnessPath> shortest_witness(const PeriodicSpec& s) {
  const CompactGraph& k = s.cell;
  std::optional<WitnessPath> best;
  for (const auto& [donor, receiver] : s.sigma) {
    std::vector<double> dist(k.vertex_count(), std::numeric_limits<double>::infinity());
    std::vector<EdgeIndex> via(k.vertex_count(), static_cast<EdgeIndex>(-1));
    using Item = std::pair<double, VertexIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[donor] = 0.0;
    queue.emplace(0.0, donor);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > dist[v]) continue;
      for (EdgeIndex e : k.incident(v)) {
        const Edge& ed = k.edge(e);
        const VertexIndex w = ed.v == v ? ed.w : ed.v;
        if (d + ed.length < dist[w]) {
          dist[w] = d + ed.length;
          via[w] = e;
          queue.emplace(dist[w], w);
        }
      }
    }
    if (!std::isfinite(dist[receiver])) continue;
    if (best && dist[receiver] >= best->length) continue;
    WitnessPath path{donor, receiver, {}, dist[receiver]};
    for (VertexIndex v = receiver; v != donor;) {
      const Edge& ed = k.edge(via[v]);
      path.edges.push_back(via[v]);
      v = ed.v == v ? ed.w : ed.v;
    }
    std::reverse(path.edges.begin(), path.edges.end());
    best = path;
  }
  return best;
}

}  // namespace

SpecCheck validate_spec(const PeriodicSpec& s) {
  SpecCheck check;
  auto& problems = check.problems;
  const CompactGraph& k = s.cell;
  const std::size_t nv = k.vertex_count();

  if (nv == 0) problems.push_back("cell has no vertices");
  if (k.edge_count() == 0) problems.push_back("cell has no edges");
  if (s.donors.empty()) problems.push_back("donor set D is empty");
  if (s.receivers.empty()) problems.push_back("receiver set R is empty");

  for (VertexIndex v : s.donors) {
    if (v >= nv) problems.push_back("donor index " + std::to_string(v) + " is not a cell vertex");
  }
  for (VertexIndex v : s.receivers) {
    if (v >= nv) problems.push_back("receiver index " + std::to_string(v) + " is not a cell vertex");
  }
  if (!problems.empty()) return check;

  const std::set<VertexIndex> donors(s.donors.begin(), s.donors.end());
  const std::set<VertexIndex> receivers(s.receivers.begin(), s.receivers.end());

  std::vector<VertexIndex> both;
  std::set_intersection(donors.begin(), donors.end(), receivers.begin(), receivers.end(),
                        std::back_inserter(both));
  if (!both.empty()) problems.push_back("D and R intersect at {" + label_list(k, both) + "}");

  std::map<VertexIndex, std::vector<VertexIndex>> preimages;
  for (VertexIndex d : donors) {
    const auto it = s.sigma.find(d);
    if (it == s.sigma.end()) {
      problems.push_back("sigma is undefined on donor " + k.vertex_label(d));
      continue;
    }
    if (receivers.count(it->second) == 0) {
      problems.push_back("sigma(" + k.vertex_label(d) + ") = " +
                         (it->second < nv ? k.vertex_label(it->second) : "?") +
                         " is not a receiver");
      continue;
    }
    preimages[it->second].push_back(d);
  }
  for (const auto& [d, r] : s.sigma) {
    if (donors.count(d) == 0) {
      problems.push_back("sigma has an entry for non-donor " +
                         (d < nv ? k.vertex_label(d) : std::to_string(d)));
    }
  }
  for (const auto& [r, ds] : preimages) {
    if (ds.size() > 1) {
      problems.push_back("sigma is not injective: {" + label_list(k, ds) + "} all map to " +
                         k.vertex_label(r));
    }
  }
  std::vector<VertexIndex> missed;
  for (VertexIndex r : receivers) {
    if (preimages.count(r) == 0) missed.push_back(r);
  }
  if (!missed.empty()) {
    problems.push_back("sigma is not surjective: no donor maps to {" + label_list(k, missed) + "}");
  }

  if (components(k).count != 1) problems.push_back("cell is not connected");
  if (!problems.empty()) return check;

  const TruncatedGraph three = glue_cells(s, -1, 1);
  bool branching = false;
  for (VertexIndex v = 0; v < nv; ++v) {
    if (degree(three.graph, three.merged(0, v)) >= 3) branching = true;
  }
  if (!branching) {
    problems.push_back("the glued graph has no vertex of degree >= 3");
    return check;
  }
  check.witness = shortest_witness(s);
  return check;
}

WitnessPath require_valid(const PeriodicSpec& s) {
  SpecCheck check = validate_spec(s);
  if (!check.accepted()) throw ValidationError(check.problems);
  return *check.witness;
}

VertexIndex TruncatedGraph::merged(int cell, VertexIndex v) const {
  if (cell < firstCell || cell > lastCell || v >= cellVertexCount) {
    throw InputError("cell vertex outside the truncation");
  }
  return mergeMap[static_cast<std::size_t>(cell - firstCell) * cellVertexCount + v];
}

EdgeIndex TruncatedGraph::edge_of(int cell, EdgeIndex orbit) const {
  if (cell < firstCell || cell > lastCell || orbit >= cellEdgeCount) {
    throw InputError("cell edge outside the truncation");
  }
  return static_cast<std::size_t>(cell - firstCell) * cellEdgeCount + orbit;
}

TruncatedGraph glue_cells(const PeriodicSpec& s, int first, int last) {
  if (last < first) throw InputError("glue_cells: empty cell range");
  const CompactGraph& k = s.cell;
  const std::size_t nv = k.vertex_count();
  // Padding lets identifications that pass through neighbouring copies show up.
  const int pad = static_cast<int>(nv) + 1;
  const int lo = first - pad;
  const int hi = last + pad;
  const auto slot = [&](int cell, VertexIndex v) {
    return static_cast<std::size_t>(cell - lo) * nv + v;
  };
  UnionFind uf(static_cast<std::size_t>(hi - lo + 1) * nv);
  for (int i = lo; i < hi; ++i) {
    for (const auto& [d, r] : s.sigma) uf.unite(slot(i, d), slot(i + 1, r));
  }

  TruncatedGraph t;
  t.firstCell = first;
  t.lastCell = last;
  t.cellVertexCount = nv;
  t.cellEdgeCount = k.edge_count();
  t.mergeMap.assign(static_cast<std::size_t>(last - first + 1) * nv, 0);
  std::map<std::size_t, VertexIndex> classVertex;
  for (int i = first; i <= last; ++i) {
    for (VertexIndex v = 0; v < nv; ++v) {
      const std::size_t root = uf.find(slot(i, v));
      auto it = classVertex.find(root);
      if (it == classVertex.end()) {
        const VertexIndex mv = t.graph.add_vertex(k.vertex_label(v) + "@" + std::to_string(i));
        it = classVertex.emplace(root, mv).first;
        t.vertexCell.push_back(i);
      }
      t.mergeMap[static_cast<std::size_t>(i - first) * nv + v] = it->second;
    }
  }
  for (int i = first; i <= last; ++i) {
    for (EdgeIndex e = 0; e < k.edge_count(); ++e) {
      const Edge& ed = k.edge(e);
      t.graph.add_edge(ed.id + "@" + std::to_string(i), t.merged(i, ed.v), t.merged(i, ed.w),
                       ed.length);
      t.edgeCell.push_back(i);
      t.edgeOrbit.push_back(e);
    }
  }
  t.boundary.assign(t.graph.vertex_count(), false);
  return t;
}

TruncatedGraph build_truncation(const PeriodicSpec& s, int N) {
  if (N < 0) throw InputError("build_truncation: N must be nonnegative");
  TruncatedGraph t = glue_cells(s, -N, N);
  t.N = N;
  for (VertexIndex d : s.donors) t.boundary[t.merged(N, d)] = true;
  for (VertexIndex r : s.receivers) t.boundary[t.merged(-N, r)] = true;
  return t;
}

CompactGraph cells_subgraph(const TruncatedGraph& t, int lo, int hi) {
  lo = std::max(lo, t.firstCell);
  hi = std::min(hi, t.lastCell);
  CompactGraph g;
  std::map<VertexIndex, VertexIndex> renumber;
  const auto keep = [&](VertexIndex v) {
    auto it = renumber.find(v);
    if (it == renumber.end()) it = renumber.emplace(v, g.add_vertex(t.graph.vertex_label(v))).first;
    return it->second;
  };
  for (int i = lo; i <= hi; ++i) {
    for (VertexIndex v = 0; v < t.cellVertexCount; ++v) keep(t.merged(i, v));
  }
  for (EdgeIndex e = 0; e < t.graph.edge_count(); ++e) {
    if (t.edgeCell[e] < lo || t.edgeCell[e] > hi) continue;
    const Edge& ed = t.graph.edge(e);
    g.add_edge(ed.id, keep(ed.v), keep(ed.w), ed.length);
  }
  return g;
}

const char* to_string(NormalizationResult::Outcome o) noexcept {
  switch (o) {
    case NormalizationResult::Outcome::AlreadyNormal: return "AlreadyNormal";
    case NormalizationResult::Outcome::Normalized: return "Normalized";
    case NormalizationResult::Outcome::StarLike: return "StarLike";
  }
  return "?";
}

namespace {

// Quotient of the cell identifying donors with a common image.
PeriodicSpec merge_common_preimages(const PeriodicSpec& s) {
  const CompactGraph& k = s.cell;
  UnionFind uf(k.vertex_count());
  std::map<VertexIndex, VertexIndex> firstPreimage;
  for (const auto& [d, r] : s.sigma) {
    const auto [it, fresh] = firstPreimage.emplace(r, d);
    if (!fresh) uf.unite(it->second, d);
  }
  std::map<std::size_t, std::vector<VertexIndex>> members;
  for (VertexIndex v = 0; v < k.vertex_count(); ++v) members[uf.find(v)].push_back(v);

  PeriodicSpec out;
  out.name = s.name;
  std::vector<VertexIndex> image(k.vertex_count());
  for (const auto& [root, vs] : members) {
    std::string label;
    for (VertexIndex v : vs) label += (label.empty() ? "" : "+") + k.vertex_label(v);
    const VertexIndex nvtx = out.cell.add_vertex(label);
    for (VertexIndex v : vs) image[v] = nvtx;
  }
  for (const Edge& e : k.edges()) out.cell.add_edge(e.id, image[e.v], image[e.w], e.length);
  std::set<VertexIndex> donors, receivers;
  for (VertexIndex d : s.donors) donors.insert(image[d]);
  for (VertexIndex r : s.receivers) receivers.insert(image[r]);
  out.donors.assign(donors.begin(), donors.end());
  out.receivers.assign(receivers.begin(), receivers.end());
  for (const auto& [d, r] : s.sigma) out.sigma[image[d]] = image[r];
  return out;
}

}  // namespace

NormalizationResult normalize_pasting(const PeriodicSpec& raw) {
  using Outcome = NormalizationResult::Outcome;
  const CompactGraph& k = raw.cell;
  if (raw.donors.empty()) throw InputError("normalize_pasting: donor set is empty");
  if (raw.receivers.empty()) throw InputError("normalize_pasting: receiver set is empty");
  for (VertexIndex d : raw.donors) {
    if (d >= k.vertex_count()) throw InputError("normalize_pasting: donor outside the cell");
    if (raw.sigma.count(d) == 0) {
      throw InputError("normalize_pasting: sigma undefined on donor " + k.vertex_label(d));
    }
  }

  NormalizationResult result;
  result.spec = raw;
  PeriodicSpec& s = result.spec;

  std::set<VertexIndex> image;
  for (const auto& [d, r] : s.sigma) image.insert(r);
  if (image != std::set<VertexIndex>(s.receivers.begin(), s.receivers.end())) {
    s.receivers.assign(image.begin(), image.end());
    result.steps.push_back("receivers restricted to the image of sigma");
  }

  if (s.sigma.size() != image.size()) {
    s = merge_common_preimages(s);
    result.steps.push_back("donors sharing an image identified in the cell");
  }

  const std::set<VertexIndex> donors(s.donors.begin(), s.donors.end());
  const std::set<VertexIndex> receivers(s.receivers.begin(), s.receivers.end());
  std::set<VertexIndex> both;
  std::set_intersection(donors.begin(), donors.end(), receivers.begin(), receivers.end(),
                        std::inserter(both, both.end()));

  if (!both.empty()) {
    // sigma is injective here, so links inside D and R form disjoint chains or cycles.
    std::size_t longest = 0;
    for (VertexIndex start : both) {
      std::vector<VertexIndex> walk{start};
      std::set<VertexIndex> seen{start};
      VertexIndex v = start;
      while (true) {
        const VertexIndex next = s.sigma.at(v);
        if (both.count(next) == 0) break;
        if (next == start) {
          for (VertexIndex c : walk) result.cycle.push_back(s.cell.vertex_label(c));
          result.outcome = Outcome::StarLike;
          result.steps.push_back("sigma cycles inside D and R; the graph has finite diameter");
          return result;
        }
        if (!seen.insert(next).second) break;
        walk.push_back(next);
        v = next;
      }
      longest = std::max(longest, walk.size());
    }
    const int copies = static_cast<int>(longest) + 1;
    const TruncatedGraph block = glue_cells(s, 0, copies - 1);
    PeriodicSpec glued;
    glued.name = s.name;
    glued.cell = block.graph;
    std::set<VertexIndex> newDonors, newReceivers;
    for (VertexIndex d : s.donors) {
      const VertexIndex from = block.merged(copies - 1, d);
      const VertexIndex to = block.merged(0, s.sigma.at(d));
      newDonors.insert(from);
      newReceivers.insert(to);
      glued.sigma[from] = to;
    }
    glued.donors.assign(newDonors.begin(), newDonors.end());
    glued.receivers.assign(newReceivers.begin(), newReceivers.end());
    for (VertexIndex d : glued.donors) {
      if (newReceivers.count(d) != 0) {
        throw std::logic_error("normalize_pasting: block gluing left D and R intersecting");
      }
    }
    s = std::move(glued);
    result.cellMultiplier *= copies;
    result.steps.push_back("cell replaced by " + std::to_string(copies) + " glued copies");
  }

  result.outcome = result.steps.empty() ? Outcome::AlreadyNormal : Outcome::Normalized;
  return result;
}

bool normalization_consistent(const PeriodicSpec& raw, const NormalizationResult& r, int N) {
  if (N < 0) throw InputError("normalization_consistent: N must be nonnegative");
  if (r.outcome == NormalizationResult::Outcome::StarLike) return false;
  const int m = r.cellMultiplier;
  const TruncatedGraph rewritten = glue_cells(r.spec, -N, N);
  const TruncatedGraph original = glue_cells(raw, -N * m, N * m + m - 1);
  return graphs_equal(rewritten.graph, original.graph).has_value();
}

}  // namespace pergraph
