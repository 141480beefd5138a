#include "pergraph/graph_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>

#include "pergraph/errors.hpp"

namespace pergraph {

namespace {

inline double signed_power(double x, double q) { return std::copysign(std::pow(std::abs(x), q), x); }

inline double simpson_piece(double a, double b, double p, double h) {
  const double m = 0.5 * (a + b);
  return h / 6.0 * (std::pow(std::abs(a), p) + 4.0 * std::pow(std::abs(m), p) + std::pow(std::abs(b), p));
}

void require_exponent(double p) {
  if (!(p >= 1.0)) throw InputError("Lp exponent must be at least 1");
}

}  // namespace

Mesh::Mesh(std::shared_ptr<const TruncatedGraph> owner, double h) : owner_(std::move(owner)), h_(h) {
  if (!(h > 0.0)) throw InputError("mesh spacing must be positive");
  for (const Edge& e : graph().edges()) {
    const double intervals = std::ceil(e.length / h * (1.0 - 1e-12));
    perEdge_.push_back(static_cast<std::size_t>(std::max(1.0, intervals)) + 1);
  }
  layout();
}

Mesh::Mesh(std::shared_ptr<const TruncatedGraph> owner, std::vector<std::size_t> nodesPerEdge)
    : owner_(std::move(owner)), perEdge_(std::move(nodesPerEdge)) {
  if (perEdge_.size() != graph().edge_count()) throw InputError("one node count per edge expected");
  for (EdgeIndex e = 0; e < perEdge_.size(); ++e) {
    if (perEdge_[e] < 2) throw InputError("every edge needs at least two nodes");
    h_ = std::max(h_, spacing(e));
  }
  layout();
}

void Mesh::layout() {
  offset_.assign(perEdge_.size(), 0);
  std::size_t next = graph().vertex_count();
  for (EdgeIndex e = 0; e < perEdge_.size(); ++e) {
    offset_[e] = next;
    next += perEdge_[e] - 2;
  }
  nodeCount_ = next;
}

double Mesh::finest_spacing() const noexcept {
  double h = std::numeric_limits<double>::infinity();
  for (EdgeIndex e = 0; e < perEdge_.size(); ++e) h = std::min(h, spacing(e));
  return h;
}

Mesh Mesh::refined() const {
  std::vector<std::size_t> counts(perEdge_.size());
  for (EdgeIndex e = 0; e < perEdge_.size(); ++e) counts[e] = 2 * perEdge_[e] - 1;
  Mesh m(owner_, counts);
  m.h_ = 0.5 * h_;
  return m;
}

MeshPtr make_mesh(const TruncatedGraph& t, double h) {
  return make_mesh(std::make_shared<const TruncatedGraph>(t), h);
}

MeshPtr make_mesh(std::shared_ptr<const TruncatedGraph> t, double h) {
  return std::make_shared<const Mesh>(std::move(t), h);
}

GraphFunction zero_function(MeshPtr mesh) {
  const auto n = static_cast<Eigen::Index>(mesh->node_count());
  return GraphFunction{std::move(mesh), Eigen::VectorXd::Zero(n)};
}

GraphFunction sample(MeshPtr mesh, const std::function<double(EdgeIndex, double)>& f, double tol) {
  GraphFunction u = zero_function(mesh);
  const CompactGraph& g = mesh->graph();
  std::vector<bool> set(g.vertex_count(), false);
  const auto put_vertex = [&](VertexIndex v, double value, EdgeIndex e) {
    if (!std::isfinite(value)) throw InputError("sampled function is not finite");
    if (!set[v]) {
      u.values[static_cast<Eigen::Index>(v)] = value;
      set[v] = true;
    } else if (std::abs(u.values[static_cast<Eigen::Index>(v)] - value) > tol) {
      throw InputError("sampled function is discontinuous at vertex " + g.vertex_label(v) +
                       " (edge " + g.edge(e).id + ")");
    }
  };
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const std::size_t n = mesh->nodes_on_edge(e);
    const double h = mesh->spacing(e);
    const Edge& ed = g.edge(e);
    put_vertex(ed.v, f(e, 0.0), e);
    put_vertex(ed.w, f(e, ed.length), e);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double value = f(e, h * double(j));
      if (!std::isfinite(value)) throw InputError("sampled function is not finite");
      u.values[static_cast<Eigen::Index>(mesh->node(e, j))] = value;
    }
  }
  return u;
}

double value_at(const GraphFunction& u, const GraphPoint& x) {
  const Mesh& m = *u.mesh;
  const double len = m.graph().edge(x.edge).length;
  if (x.coordinate < 0.0 || x.coordinate > len) throw InputError("point outside its edge");
  const double h = m.spacing(x.edge);
  const std::size_t last = m.nodes_on_edge(x.edge) - 1;
  const std::size_t j = std::min(last - 1, static_cast<std::size_t>(x.coordinate / h));
  const double t = x.coordinate / h - double(j);
  const double a = u.values[static_cast<Eigen::Index>(m.node(x.edge, j))];
  const double b = u.values[static_cast<Eigen::Index>(m.node(x.edge, j + 1))];
  return (1.0 - t) * a + t * b;
}

static double edge_power(const GraphFunction& u, double p, EdgeIndex e) {
  const Mesh& m = *u.mesh;
  const double h = m.spacing(e);
  const std::size_t n = m.nodes_on_edge(e);
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    sum += simpson_piece(u.values[static_cast<Eigen::Index>(m.node(e, j))],
                         u.values[static_cast<Eigen::Index>(m.node(e, j + 1))], p, h);
  }
  return sum;
}

double lp_power(const GraphFunction& u, double p, const std::vector<bool>& edges) {
  require_exponent(p);
  double total = 0.0;
  for (EdgeIndex e = 0; e < u.mesh->graph().edge_count(); ++e) {
    if (edges[e]) total += edge_power(u, p, e);
  }
  return total;
}

double lp_power(const GraphFunction& u, double p) {
  return lp_power(u, p, std::vector<bool>(u.mesh->graph().edge_count(), true));
}

double lp_norm(const GraphFunction& u, double p) { return std::pow(lp_power(u, p), 1.0 / p); }

double l2_mass(const GraphFunction& u) { return lp_power(u, 2.0); }

double kinetic(const GraphFunction& u, const std::vector<bool>& edges) {
  const Mesh& m = *u.mesh;
  double total = 0.0;
  for (EdgeIndex e = 0; e < m.graph().edge_count(); ++e) {
    if (!edges[e]) continue;
    const double h = m.spacing(e);
    const std::size_t n = m.nodes_on_edge(e);
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double d = u.values[static_cast<Eigen::Index>(m.node(e, j + 1))] -
                       u.values[static_cast<Eigen::Index>(m.node(e, j))];
      sum += d * d;
    }
    total += sum / h;
  }
  return total;
}

double kinetic(const GraphFunction& u) {
  return kinetic(u, std::vector<bool>(u.mesh->graph().edge_count(), true));
}

double sup_norm(const GraphFunction& u) {
  return u.values.size() == 0 ? 0.0 : u.values.cwiseAbs().maxCoeff();
}

double energy(const GraphFunction& u, double p) {
  if (!(p > 2.0 && p <= 6.0)) throw InputError("energy exponent must lie in (2, 6]");
  return 0.5 * kinetic(u) - lp_power(u, p) / p;
}

GraphFunction rescale_to_mass(const GraphFunction& u, double mu) {
  const double m = l2_mass(u);
  if (!(m > 0.0)) throw InputError("cannot rescale the zero function");
  if (!(mu > 0.0)) throw InputError("target mass must be positive");
  return GraphFunction{u.mesh, u.values * std::sqrt(mu / m)};
}

ElResidual el_residual(const GraphFunction& u, double p) {
  const double mass = l2_mass(u);
  if (!(mass > 0.0)) throw InputError("el_residual of the zero function");
  const Mesh& m = *u.mesh;
  const CompactGraph& g = m.graph();
  ElResidual r;
  r.lambda = (lp_power(u, p) - kinetic(u)) / mass;
  const auto val = [&u](std::size_t k) { return u.values[static_cast<Eigen::Index>(k)]; };

  double interior = 0.0;
  std::vector<double> flux(g.vertex_count(), 0.0);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const double h = m.spacing(e);
    const std::size_t n = m.nodes_on_edge(e);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double c = val(m.node(e, j));
      const double res = (val(m.node(e, j + 1)) - 2.0 * c + val(m.node(e, j - 1))) / (h * h) +
                         signed_power(c, p - 1.0) - r.lambda * c;
      interior += h * res * res;
    }
    // Outgoing slope at each end, corrected by the element load so that it is
    // second-order accurate and vanishes exactly at discrete critical points.
    const auto end_flux = [&](std::size_t at, std::size_t next) {
      const double a = val(at);
      const double b = val(next);
      const double mid = 0.5 * (a + b);
      return (b - a) / h + h / 6.0 * (signed_power(a, p - 1.0) + 2.0 * signed_power(mid, p - 1.0)) -
             r.lambda * h / 6.0 * (2.0 * a + b);
    };
    flux[g.edge(e).v] += end_flux(m.node(e, 0), m.node(e, 1));
    flux[g.edge(e).w] += end_flux(m.node(e, n - 1), m.node(e, n - 2));
  }
  r.interiorResidual = std::sqrt(interior);
  for (double f : flux) r.kirchhoffMax = std::max(r.kirchhoffMax, std::abs(f));
  return r;
}

GraphFunction transfer(const GraphFunction& u, MeshPtr target) {
  const Mesh& src = *u.mesh;
  const TruncatedGraph& from = src.owner();
  const TruncatedGraph& to = target->owner();
  if (from.cellVertexCount != to.cellVertexCount || from.cellEdgeCount != to.cellEdgeCount) {
    throw InputError("transfer: truncations of different cells");
  }
  GraphFunction out = zero_function(target);
  const int lo = std::max(from.firstCell, to.firstCell);
  const int hi = std::min(from.lastCell, to.lastCell);
  for (int i = lo; i <= hi; ++i) {
    for (VertexIndex v = 0; v < to.cellVertexCount; ++v) {
      out.values[static_cast<Eigen::Index>(to.merged(i, v))] =
          u.values[static_cast<Eigen::Index>(from.merged(i, v))];
    }
    for (EdgeIndex o = 0; o < to.cellEdgeCount; ++o) {
      const EdgeIndex de = to.edge_of(i, o);
      const EdgeIndex se = from.edge_of(i, o);
      const std::size_t n = target->nodes_on_edge(de);
      const double h = target->spacing(de);
      const double len = from.graph.edge(se).length;
      for (std::size_t j = 1; j + 1 < n; ++j) {
        out.values[static_cast<Eigen::Index>(target->node(de, j))] =
            value_at(u, {se, std::min(len, double(j) * h)});
      }
    }
  }
  return out;
}

GraphFunction cell_shift(const GraphFunction& u, int k) {
  const Mesh& m = *u.mesh;
  const TruncatedGraph& t = m.owner();
  GraphFunction out = zero_function(u.mesh);
  if (k == 0) return u;
  for (int i = t.firstCell; i <= t.lastCell; ++i) {
    const int from = i - k;
    if (from < t.firstCell || from > t.lastCell) continue;
    for (VertexIndex v = 0; v < t.cellVertexCount; ++v) {
      out.values[static_cast<Eigen::Index>(t.merged(i, v))] =
          u.values[static_cast<Eigen::Index>(t.merged(from, v))];
    }
    for (EdgeIndex o = 0; o < t.cellEdgeCount; ++o) {
      const EdgeIndex dst = t.edge_of(i, o);
      const EdgeIndex src = t.edge_of(from, o);
      const std::size_t n = m.nodes_on_edge(dst);
      if (n != m.nodes_on_edge(src)) throw InputError("cell_shift needs a periodic mesh");
      for (std::size_t j = 1; j + 1 < n; ++j) {
        out.values[static_cast<Eigen::Index>(m.node(dst, j))] =
            u.values[static_cast<Eigen::Index>(m.node(src, j))];
      }
    }
  }
  return out;
}

GraphFunction distance_from(MeshPtr mesh, VertexIndex source) {
  const CompactGraph& g = mesh->graph();
  if (source >= g.vertex_count()) throw InputError("distance_from: unknown vertex");
  std::vector<double> dist(g.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, VertexIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (EdgeIndex e : g.incident(v)) {
      const Edge& ed = g.edge(e);
      const VertexIndex w = ed.v == v ? ed.w : ed.v;
      if (d + ed.length < dist[w]) {
        dist[w] = d + ed.length;
        queue.emplace(dist[w], w);
      }
    }
  }
  return sample(std::move(mesh), [&](EdgeIndex e, double x) {
    const Edge& ed = g.edge(e);
    return std::min(dist[ed.v] + x, dist[ed.w] + ed.length - x);
  }, std::numeric_limits<double>::infinity());
}

std::vector<double> cell_masses(const GraphFunction& u) {
  const TruncatedGraph& t = u.mesh->owner();
  std::vector<double> masses(static_cast<std::size_t>(t.cell_count()), 0.0);
  const std::size_t ne = t.graph.edge_count();
  for (EdgeIndex e = 0; e < ne; ++e) {
    masses[static_cast<std::size_t>(t.edgeCell[e] - t.firstCell)] += edge_power(u, 2.0, e);
  }
  return masses;
}

int argmax_cell(const GraphFunction& u) {
  const Mesh& m = *u.mesh;
  const TruncatedGraph& t = m.owner();
  double best = -1.0;
  int cell = 0;
  for (VertexIndex v = 0; v < t.graph.vertex_count(); ++v) {
    const double a = std::abs(u.values[static_cast<Eigen::Index>(v)]);
    if (a > best) {
      best = a;
      cell = t.vertexCell[v];
    }
  }
  for (EdgeIndex e = 0; e < t.graph.edge_count(); ++e) {
    for (std::size_t j = 1; j + 1 < m.nodes_on_edge(e); ++j) {
      const double a = std::abs(u.values[static_cast<Eigen::Index>(m.node(e, j))]);
      if (a > best) {
        best = a;
        cell = t.edgeCell[e];
      }
    }
  }
  return cell;
}

std::shared_ptr<const TruncatedGraph> path_graph(const std::vector<double>& lengths) {
  if (lengths.empty()) throw InputError("path_graph needs at least one edge");
  auto t = std::make_shared<TruncatedGraph>();
  t->graph.add_vertex("x0");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    t->graph.add_vertex("x" + std::to_string(i + 1));
    t->graph.add_edge("s" + std::to_string(i), i, i + 1, lengths[i]);
  }
  t->cellVertexCount = t->graph.vertex_count();
  t->cellEdgeCount = t->graph.edge_count();
  t->vertexCell.assign(t->graph.vertex_count(), 0);
  t->edgeCell.assign(t->graph.edge_count(), 0);
  t->edgeOrbit.resize(t->graph.edge_count());
  for (EdgeIndex e = 0; e < t->edgeOrbit.size(); ++e) t->edgeOrbit[e] = e;
  t->mergeMap.resize(t->graph.vertex_count());
  for (VertexIndex v = 0; v < t->mergeMap.size(); ++v) t->mergeMap[v] = v;
  t->boundary.assign(t->graph.vertex_count(), false);
  t->boundary.front() = true;
  t->boundary.back() = true;
  return t;
}

GraphFunction sample_on_line(double a, double b, double h, const std::function<double(double)>& f) {
  if (!(b > a)) throw InputError("sample_on_line: empty interval");
  return sample(make_mesh(path_graph({b - a}), h), [&](EdgeIndex, double x) { return f(a + x); });
}

void write_profile_csv(const GraphFunction& u, std::ostream& out) {
  const Mesh& m = *u.mesh;
  const TruncatedGraph& t = m.owner();
  out << "edge_id,cell,x,value\n";
  char buf[96];
  for (EdgeIndex e = 0; e < t.graph.edge_count(); ++e) {
    const double h = m.spacing(e);
    for (std::size_t j = 0; j < m.nodes_on_edge(e); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.edgeCell[e], h * double(j),
                    u.values[static_cast<Eigen::Index>(m.node(e, j))]);
      out << t.graph.edge(e).id << ',' << buf;
    }
  }
}

namespace fem {

SparseMatrix stiffness(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  for (EdgeIndex e = 0; e < mesh.graph().edge_count(); ++e) {
    const double k = 1.0 / mesh.spacing(e);
    for (std::size_t j = 0; j + 1 < mesh.nodes_on_edge(e); ++j) {
      const auto a = static_cast<int>(mesh.node(e, j));
      const auto b = static_cast<int>(mesh.node(e, j + 1));
      trip.emplace_back(a, a, k);
      trip.emplace_back(b, b, k);
      trip.emplace_back(a, b, -k);
      trip.emplace_back(b, a, -k);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  SparseMatrix s(n, n);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

SparseMatrix mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  for (EdgeIndex e = 0; e < mesh.graph().edge_count(); ++e) {
    const double h = mesh.spacing(e);
    for (std::size_t j = 0; j + 1 < mesh.nodes_on_edge(e); ++j) {
      const auto a = static_cast<int>(mesh.node(e, j));
      const auto b = static_cast<int>(mesh.node(e, j + 1));
      trip.emplace_back(a, a, h / 3.0);
      trip.emplace_back(b, b, h / 3.0);
      trip.emplace_back(a, b, h / 6.0);
      trip.emplace_back(b, a, h / 6.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::VectorXd lp_power_gradient(const GraphFunction& u, double p) {
  const Mesh& mesh = *u.mesh;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.values.size());
  for (EdgeIndex e = 0; e < mesh.graph().edge_count(); ++e) {
    const double w = mesh.spacing(e) * p / 6.0;
    for (std::size_t j = 0; j + 1 < mesh.nodes_on_edge(e); ++j) {
      const auto a = static_cast<Eigen::Index>(mesh.node(e, j));
      const auto b = static_cast<Eigen::Index>(mesh.node(e, j + 1));
      const double mid = signed_power(0.5 * (u.values[a] + u.values[b]), p - 1.0);
      g[a] += w * (signed_power(u.values[a], p - 1.0) + 2.0 * mid);
      g[b] += w * (signed_power(u.values[b], p - 1.0) + 2.0 * mid);
    }
  }
  return g;
}

}  // namespace fem

}  // namespace pergraph
