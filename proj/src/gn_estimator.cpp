#include "pergraph/gn_estimator.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "pergraph/errors.hpp"
#include "pergraph/solitons.hpp"

namespace pergraph {

double gn_quotient(const GraphFunction& u, double p) {
  if (!(p > 2.0)) throw InputError("gn_quotient: p must exceed 2");
  const double m = l2_mass(u);
  const double k = kinetic(u);
  if (!(m > 0.0)) throw InputError("gn_quotient: zero function");
  if (!(k > 0.0)) throw InputError("gn_quotient: constant function (zero kinetic energy)");
  return lp_power(u, p) / (std::pow(m, 0.25 * p + 0.5) * std::pow(k, 0.25 * p - 0.5));
}

double critical_mass(double cg) {
  if (!(cg > 0.0)) throw InputError("critical_mass: constant must be positive");
  return std::sqrt(3.0 / cg);
}

namespace {

using Vec = Eigen::VectorXd;

/// Truncation boundary vertices are held at zero, so every iterate extends by zero to the
/// infinite graph (on the compact truncation itself constants would have infinite quotient).
struct Ascent {
  fem::SparseMatrix S, M, A;
  Eigen::SimplicialLDLT<fem::SparseMatrix> solver;
  Vec free;
  double sigma = 0.0;

  explicit Ascent(const Mesh& mesh)
      : S(fem::stiffness(mesh)), M(fem::mass(mesh)), free(Vec::Ones(Eigen::Index(mesh.node_count()))) {
    const auto& boundary = mesh.owner().boundary;
    for (std::size_t v = 0; v < boundary.size(); ++v) {
      if (boundary[v]) free[Eigen::Index(v)] = 0.0;
    }
  }

  void factor(double s) {
    sigma = s;
    A = S + sigma * M;
    for (int k = 0; k < A.outerSize(); ++k) {
      for (fem::SparseMatrix::InnerIterator it(A, k); it; ++it) {
        if (free[it.row()] == 0.0 || free[it.col()] == 0.0) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
      }
    }
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw InconclusiveError("gn_ascend: factorization failed");
  }
};

struct Point {
  GraphFunction u;
  double logQ = 0.0;
  double K = 0.0;
  Vec d;
};

Point evaluate(Ascent& a, GraphFunction u) {
  Point pt;
  pt.u = std::move(u);
  const Vec& x = pt.u.values;
  const Vec Su = a.S * x;
  const Vec Mu = a.M * x;
  pt.K = x.dot(Su);
  const double m = x.dot(Mu);
  const double P = lp_power(pt.u, 6.0);
  pt.logQ = std::log(P) - 2.0 * std::log(m) - std::log(pt.K);
  const Vec g = fem::lp_power_gradient(pt.u, 6.0) / P - 4.0 * Mu / m - 2.0 * Su / pt.K;
  pt.d = a.solver.solve(g.cwiseProduct(a.free));
  return pt;
}

}  // namespace

GNTrace gn_ascend(GraphFunction& u, const GNOptions& opts, const std::string& label) {
  GNTrace trace;
  trace.start = label;
  Ascent a(*u.mesh);
  u = rescale_to_mass(GraphFunction{u.mesh, u.values.cwiseAbs().cwiseProduct(a.free)}, 1.0);
  if (!(kinetic(u) > 0.0)) throw InputError("gn_ascend: constant start");
  a.factor(std::clamp(kinetic(u), 1e-4, 1e6));
  Point pt = evaluate(a, u);
  std::deque<double> recent{pt.logQ};
  double tau = 1.0 / a.sigma;
  int it = 0;
  for (; it < opts.maxIters; ++it) {
    bool accepted = false;
    Point next;
    for (int bt = 0; bt < 60; ++bt) {
      next = evaluate(a, rescale_to_mass(GraphFunction{u.mesh, pt.u.values + tau * pt.d}, 1.0));
      if (next.logQ >= pt.logQ) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      trace.converged = true;
      break;
    }
    const Vec s = next.u.values - pt.u.values;
    const Vec y = pt.d - next.d;  // ascent: the curvature of -logQ
    const Vec As = a.A * s;
    const double sAy = As.dot(y);
    tau = sAy > 0.0 ? std::clamp(As.dot(s) / sAy, 1e-12, 1e6) : std::min(2.0 * tau, 1e6);
    pt = std::move(next);
    recent.push_back(pt.logQ);
    if (static_cast<int>(recent.size()) > opts.window + 1) recent.pop_front();
    if (static_cast<int>(recent.size()) == opts.window + 1 &&
        std::expm1(recent.back() - recent.front()) < opts.relTol) {
      trace.converged = true;
      ++it;
      break;
    }
    if ((it + 1) % 25 == 0) {
      const double want = std::clamp(pt.K, 1e-4, 1e6);
      if (want > 4.0 * a.sigma || want < 0.25 * a.sigma) {
        a.factor(want);
        pt = evaluate(a, std::move(pt.u));
        tau = 1.0 / a.sigma;
        recent.clear();
        recent.push_back(pt.logQ);
      }
    }
  }
  u = pt.u;
  trace.iterations = it;
  trace.value = std::exp(pt.logQ);
  return trace;
}

namespace {

std::vector<std::pair<std::string, GraphFunction>> gn_starts(MeshPtr mesh, const GNOptions& opts) {
  const TruncatedGraph& t = mesh->owner();
  std::vector<std::pair<std::string, GraphFunction>> out;
  const CriticalSoliton phi(1.0);

  std::set<VertexIndex> seen;
  for (VertexIndex v = 0; v < t.cellVertexCount; ++v) {
    const VertexIndex g = t.merged(0, v);
    if (!seen.insert(g).second) continue;
    const GraphFunction dist = distance_from(mesh, g);
    // Width with the largest quotient among a geometric family.
    double bestQ = -1.0;
    GraphFunction best;
    for (double lambda = 0.25; lambda * 8.0 * mesh->finest_spacing() <= 1.0; lambda *= std::numbers::sqrt2) {
      GraphFunction f{mesh, Eigen::VectorXd(dist.values.size())};
      for (Eigen::Index k = 0; k < f.values.size(); ++k) f.values[k] = phi(lambda * dist.values[k]);
      const double q = gn_quotient(f, 6.0);
      if (q > bestQ) {
        bestQ = q;
        best = std::move(f);
      }
    }
    out.emplace_back("soliton@" + t.graph.vertex_label(g), std::move(best));
  }
  for (EdgeIndex o = 0; o < t.cellEdgeCount; ++o) {
    const EdgeIndex e = t.edge_of(0, o);
    const double len = t.graph.edge(e).length;
    out.emplace_back("bump@" + t.graph.edge(e).id, sample(mesh, [&](EdgeIndex f, double x) {
      if (f != e) return 0.0;
      const double y = 2.0 * x / len - 0.5;
      return (y <= 0.0 || y >= 1.0) ? 0.0 : y * y * (1.0 - y) * (1.0 - y);
    }));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < opts.starts; ++s) {
    std::mt19937_64 r(opts.seed + 7919ULL * std::uint64_t(s + 1));
    std::vector<double> vertexValue(t.graph.vertex_count());
    for (std::size_t v = 0; v < vertexValue.size(); ++v) {
      vertexValue[v] = unit(r) * std::exp(-0.5 * std::abs(double(t.vertexCell[v])));
    }
    std::vector<double> bump(t.graph.edge_count());
    for (double& b : bump) b = unit(r);
    out.emplace_back("random#" + std::to_string(s), sample(mesh, [&](EdgeIndex e, double x) {
      const Edge& ed = t.graph.edge(e);
      const double s01 = x / ed.length;
      const double decay = std::exp(-0.5 * std::abs(double(t.edgeCell[e])));
      return (1.0 - s01) * vertexValue[ed.v] + s01 * vertexValue[ed.w] +
             decay * bump[e] * std::sin(std::numbers::pi * s01);
    }));
  }
  return out;
}

}  // namespace

GNReport estimate_cg(const PeriodicSpec& s, const GNOptions& opts) {
  if (!(opts.meshH > 0.0) || opts.truncationN < 1 || opts.starts < 0 || opts.maxIters < 1 || opts.window < 1) {
    throw InputError("estimate_cg: invalid options");
  }
  require_valid(s);
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, opts.truncationN));
  const MeshPtr mesh = make_mesh(t, opts.meshH);

  GNReport rep;
  rep.meshSpacing = opts.meshH;
  rep.truncationN = opts.truncationN;
  std::vector<GraphFunction> finals;
  for (auto& [label, f] : gn_starts(mesh, opts)) {
    rep.traces.push_back(gn_ascend(f, opts, label));
    finals.push_back(std::move(f));
  }
  rep.starts = static_cast<int>(rep.traces.size());
  std::size_t best = rep.traces.size();
  for (std::size_t i = 0; i < rep.traces.size(); ++i) {
    if (!rep.traces[i].converged) continue;
    if (best == rep.traces.size() || rep.traces[i].value > rep.traces[best].value) best = i;
  }
  if (best == rep.traces.size()) {
    std::ostringstream msg;
    msg << "estimate_cg: no start converged";
    for (const auto& tr : rep.traces) {
      msg << "\n  " << tr.start << ": value=" << tr.value << " iters=" << tr.iterations;
    }
    throw InconclusiveError(msg.str());
  }
  rep.cgEstimate = rep.traces[best].value;
  rep.bestStart = rep.traces[best].start;
  rep.maximizer = finals[best];
  rep.muGEstimate = critical_mass(rep.cgEstimate);

  if (opts.refine) {
    const auto t2 = std::make_shared<const TruncatedGraph>(build_truncation(s, opts.truncationN + 2));
    const MeshPtr mesh2 = make_mesh(t2, 0.5 * opts.meshH);
    GraphFunction u = transfer(rep.maximizer, mesh2);
    const GNTrace tr = gn_ascend(u, opts, "refined");
    rep.refinedCg = tr.value;
    rep.refinedMuG = critical_mass(tr.value);
    rep.refinedH = 0.5 * opts.meshH;
    rep.refinedN = opts.truncationN + 2;
  }
  return rep;
}

}  // namespace pergraph
