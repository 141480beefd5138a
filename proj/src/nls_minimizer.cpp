#include "pergraph/nls_minimizer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "pergraph/errors.hpp"
#include "pergraph/solitons.hpp"

namespace pergraph {

void MinimizeOptions::validate() const {
  std::vector<std::string> bad;
  if (!(p > 2.0 && p <= 6.0)) bad.push_back("p must lie in (2, 6]");
  if (!(mu > 0.0)) bad.push_back("mu must be positive");
  if (!(meshH > 0.0)) bad.push_back("meshH must be positive");
  if (truncationN < 1) bad.push_back("truncationN must be at least 1");
  if (maxIters < 1) bad.push_back("maxIters must be positive");
  if (!(gradTol > 0.0)) bad.push_back("gradTol must be positive");
  if (!(energyFloor < 0.0)) bad.push_back("energyFloor must be negative");
  if (!(kineticCap > 0.0)) bad.push_back("kineticCap must be positive");
  if (starts < 0) bad.push_back("starts must be nonnegative");
  if (recenterEvery < 1) bad.push_back("recenterEvery must be positive");
  if (!(vanishingEnergyTol > 0.0) || !(tailMassTol > 0.0)) bad.push_back("tolerances must be positive");
  if (!bad.empty()) {
    std::string msg = "invalid minimize options:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw InputError(msg);
  }
}

const char* to_string(MinimizeStatus s) noexcept {
  switch (s) {
    case MinimizeStatus::Converged: return "Converged";
    case MinimizeStatus::Vanishing: return "Vanishing";
    case MinimizeStatus::Unbounded: return "Unbounded";
    case MinimizeStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

using Vec = Eigen::VectorXd;

struct Problem {
  MeshPtr mesh;
  double p;
  double mu;
  fem::SparseMatrix S;
  fem::SparseMatrix M;
  fem::SparseMatrix A;
  Eigen::SimplicialLDLT<fem::SparseMatrix> solver;
  double sigma = 0.0;

  Problem(MeshPtr m, double p_, double mu_) : mesh(std::move(m)), p(p_), mu(mu_) {
    S = fem::stiffness(*mesh);
    M = fem::mass(*mesh);
  }

  void factor(double s) {
    sigma = s;
    A = S + sigma * M;
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw InconclusiveError("preconditioner factorization failed");
  }
};

struct State {
  GraphFunction u;
  double energy = 0.0;
  double kinetic = 0.0;
  double power = 0.0;
  Vec d;          // preconditioned projected gradient
  double gradNorm = 0.0;
};

State evaluate(Problem& pb, GraphFunction u) {
  State st;
  st.u = std::move(u);
  const Vec& x = st.u.values;
  const Vec Su = pb.S * x;
  st.kinetic = x.dot(Su);
  st.power = lp_power(st.u, pb.p);
  st.energy = 0.5 * st.kinetic - st.power / pb.p;
  const Vec gE = Su - fem::lp_power_gradient(st.u, pb.p) / pb.p;
  const Vec gM = pb.M * x;
  const Vec z1 = pb.solver.solve(gE);
  const Vec z2 = pb.solver.solve(gM);
  const double c = gM.dot(z1) / gM.dot(z2);
  st.d = z1 - c * z2;
  st.gradNorm = std::sqrt(std::max(0.0, st.d.dot(gE - c * gM)));
  return st;
}

double clamp_sigma(double lambda) { return std::clamp(lambda, 1e-6, 1e4); }

double lambda_of(const State& st, double mu) { return (st.power - st.kinetic) / mu; }

double tail_fraction(const GraphFunction& u) {
  const auto masses = cell_masses(u);
  const std::size_t n = masses.size();
  if (n <= 4) return 1.0;
  return masses[0] + masses[1] + masses[n - 2] + masses[n - 1];
}

/// Mass piled up against a free end of the truncation, well above the mean cell mass.
bool pinned_to_end(const GraphFunction& u) {
  const auto masses = cell_masses(u);
  const std::size_t n = masses.size();
  if (n <= 4) return false;
  const auto top = std::max_element(masses.begin(), masses.end());
  const std::size_t i = std::size_t(top - masses.begin());
  const double mean = std::accumulate(masses.begin(), masses.end(), 0.0) / double(n);
  return (i <= 1 || i + 2 >= n) && *top > 4.0 * mean;
}

GraphFunction recentered(const GraphFunction& u, double mu) {
  const int c = argmax_cell(u);
  if (c == 0) return u;
  return rescale_to_mass(cell_shift(u, -c), mu);
}

/// Width of the state measured in mesh intervals; below ~2 the state has collapsed onto the grid.
bool collapsed_to_grid(const State& st, const Mesh& mesh, double mu) {
  const double h = mesh.finest_spacing();
  return st.kinetic * h * h / mu > 0.25;
}

}  // namespace

namespace {

GraphFunction sech_profile(const GraphFunction& dist, double width, double p) {
  const double k = 2.0 / (p - 2.0);
  GraphFunction f{dist.mesh, Eigen::VectorXd(dist.values.size())};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    f.values[i] = std::pow(1.0 / std::cosh(std::min(dist.values[i] / width, 700.0)), k);
  }
  return f;
}

double profile_energy(const GraphFunction& dist, double width, double p, double mu) {
  return energy(rescale_to_mass(sech_profile(dist, width, p), mu), p);
}

double best_width(const GraphFunction& dist, double p, double mu) {
  const double reach = dist.values.maxCoeff();
  double best = 0.0, bestEnergy = std::numeric_limits<double>::infinity();
  for (double width = 2.0 * dist.mesh->finest_spacing(); width <= reach; width *= std::numbers::sqrt2) {
    const double e = profile_energy(dist, width, p, mu);
    if (e < bestEnergy) {
      bestEnergy = e;
      best = width;
    }
  }
  return best > 0.0 ? best : reach;
}

GraphFunction distance_from_midpoint(MeshPtr mesh, EdgeIndex e) {
  const Edge& ed = mesh->graph().edge(e);
  const GraphFunction dv = distance_from(mesh, ed.v);
  const GraphFunction dw = distance_from(mesh, ed.w);
  GraphFunction d{mesh, dv.values.cwiseMin(dw.values).array() + 0.5 * ed.length};
  const std::size_t n = mesh->nodes_on_edge(e);
  const double h = mesh->spacing(e);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    auto& x = d.values[static_cast<Eigen::Index>(mesh->node(e, j))];
    x = std::min(x, std::abs(double(j) * h - 0.5 * ed.length));
  }
  return d;
}

}  // namespace

double best_profile_width(MeshPtr mesh, VertexIndex center, double p, double mu) {
  return best_width(distance_from(std::move(mesh), center), p, mu);
}

TruncationAdvice suggest_discretization(const PeriodicSpec& s, double p, double mu, double hMax, int NMax) {
  if (!(p > 2.0 && p <= 6.0) || !(mu > 0.0) || !(hMax > 0.0)) throw InputError("suggest_discretization: bad arguments");
  const double step = require_valid(s).length;
  const double k = 2.0 / (p - 2.0);
  const double cell = s.cell.total_length();
  TruncationAdvice best;
  double bestEnergy = std::numeric_limits<double>::infinity();
  bool lastWasBest = false;
  for (int j = -24; j <= 80; ++j) {
    const double width = std::pow(2.0, 0.25 * j);
    const int N = static_cast<int>(std::ceil((8.0 * width / k + cell) / step)) + 1;
    if (N > NMax) break;
    const double h = std::min(hMax, width / 16.0);
    const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, N));
    const MeshPtr mesh = make_mesh(t, h);
    const double e = profile_energy(distance_from(mesh, t->merged(0, 0)), width, p, mu);
    lastWasBest = e < bestEnergy;
    if (lastWasBest) {
      bestEnergy = e;
      best = {N, h, width, true};
    }
  }
  best.interiorOptimum = !lastWasBest;
  return best;
}

std::vector<std::pair<std::string, GraphFunction>> initial_data(MeshPtr mesh, const MinimizeOptions& opts) {
  const TruncatedGraph& t = mesh->owner();
  std::vector<std::pair<std::string, GraphFunction>> out;

  std::set<VertexIndex> seen;
  for (VertexIndex v = 0; v < t.cellVertexCount; ++v) {
    const VertexIndex g = t.merged(0, v);
    if (!seen.insert(g).second) continue;
    const GraphFunction dist = distance_from(mesh, g);
    out.emplace_back("soliton@" + t.graph.vertex_label(g), sech_profile(dist, best_width(dist, opts.p, opts.mu), opts.p));
  }
  for (EdgeIndex o = 0; o < t.cellEdgeCount; ++o) {
    const EdgeIndex e = t.edge_of(0, o);
    const GraphFunction dist = distance_from_midpoint(mesh, e);
    out.emplace_back("soliton@" + t.graph.edge(e).id, sech_profile(dist, best_width(dist, opts.p, opts.mu), opts.p));
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  {
    GraphFunction f = zero_function(mesh);
    for (Eigen::Index k = 0; k < f.values.size(); ++k) f.values[k] = 1.0 + 0.01 * unit(rng);
    out.emplace_back("constant", std::move(f));
  }
  for (int s = 0; s < opts.starts; ++s) {
    std::mt19937_64 r(opts.seed + 1000003ULL * std::uint64_t(s + 1));
    std::vector<double> vertexValue(t.graph.vertex_count());
    for (double& x : vertexValue) x = unit(r);
    std::vector<double> bump(t.graph.edge_count());
    for (double& b : bump) b = unit(r);
    GraphFunction f = sample(mesh, [&](EdgeIndex e, double x) {
      const Edge& ed = t.graph.edge(e);
      const double s01 = x / ed.length;
      return (1.0 - s01) * vertexValue[ed.v] + s01 * vertexValue[ed.w] +
             bump[e] * std::sin(std::numbers::pi * s01);
    });
    out.emplace_back("random#" + std::to_string(s), std::move(f));
  }
  return out;
}

DescentRun descend(MeshPtr mesh, const GraphFunction& init, const MinimizeOptions& opts,
                   const std::string& label) {
  opts.validate();
  Problem pb(mesh, opts.p, opts.mu);
  DescentRun run;
  run.start = label;

  GraphFunction u0{mesh, init.values.cwiseAbs()};
  if (!(l2_mass(u0) > 0.0)) throw InputError("descend: zero initial datum");
  u0 = rescale_to_mass(u0, opts.mu);
  {
    const double P = lp_power(u0, opts.p);
    pb.factor(clamp_sigma((P - kinetic(u0)) / opts.mu));
  }
  State st = evaluate(pb, u0);
  double tau = 1.0;
  bool lastDecreased = true;

  const auto record = [&]() {
    run.history.push_back({st.energy, st.kinetic, sup_norm(st.u), argmax_cell(st.u)});
  };
  record();

  bool stationary = false;
  int flat = 0;
  int it = 0;
  for (; it < opts.maxIters; ++it) {
    if ((st.energy < opts.energyFloor || st.kinetic > opts.kineticCap) && lastDecreased) {
      run.status = MinimizeStatus::Unbounded;
      break;
    }
    if (st.gradNorm < opts.gradTol) {
      const ElResidual el = el_residual(st.u, opts.p);
      if (el.kirchhoffMax <= opts.gradTol) {
        stationary = true;
        break;
      }
    }

    bool accepted = false;
    State next;
    for (int bt = 0; bt < 60; ++bt) {
      GraphFunction trial{mesh, st.u.values - tau * st.d};
      trial = rescale_to_mass(trial, opts.mu);
      next = evaluate(pb, std::move(trial));
      if (next.energy <= st.energy) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // No descent left at working precision.
      stationary = st.gradNorm < 10.0 * opts.gradTol;
      break;
    }
    lastDecreased = next.energy < st.energy;
    flat = lastDecreased ? 0 : flat + 1;
    const Vec s = next.u.values - st.u.values;
    const Vec y = next.d - st.d;
    const Vec As = pb.A * s;
    const double sAy = As.dot(y);
    const double sAs = As.dot(s);
    tau = sAy > 0.0 ? std::clamp(sAs / sAy, 1e-8, 1e4) : std::min(2.0 * tau, 1e4);
    st = std::move(next);
    record();
    if (flat >= 50) {
      // Energy frozen at working precision.
      stationary = st.gradNorm < 10.0 * opts.gradTol;
      ++it;
      break;
    }

    if ((it + 1) % opts.recenterEvery == 0) {
      bool reset = false;
      const int c = argmax_cell(st.u);
      if (c != 0) {
        State shifted = evaluate(pb, rescale_to_mass(cell_shift(st.u, -c), opts.mu));
        if (shifted.energy <= st.energy) {
          st = std::move(shifted);
          record();
          reset = true;
        }
      }
      const double want = clamp_sigma(lambda_of(st, opts.mu));
      if (want > 4.0 * pb.sigma || want < 0.25 * pb.sigma) {
        pb.factor(want);
        st = evaluate(pb, std::move(st.u));
        reset = true;
      }
      if (reset) tau = 1.0;
    }
  }

  run.iterations = it;
  run.u = st.u;
  run.energy = st.energy;
  run.kinetic = st.kinetic;
  run.gradNorm = st.gradNorm;
  // Measured where the state sits: a state pinned to the truncation ends is not localized.
  run.tailMass = tail_fraction(st.u);
  if (run.status == MinimizeStatus::Unbounded) return run;
  if (!stationary) {
    run.status = MinimizeStatus::Inconclusive;
    return run;
  }
  if (collapsed_to_grid(st, *mesh, opts.mu)) {
    run.status = MinimizeStatus::Unbounded;
  } else if (run.tailMass <= opts.tailMassTol) {
    run.status = MinimizeStatus::Converged;
  } else if (pinned_to_end(st.u)) {
    run.status = MinimizeStatus::Inconclusive;
  } else if (std::abs(st.energy) <= opts.vanishingEnergyTol) {
    run.status = MinimizeStatus::Vanishing;
  } else {
    run.status = MinimizeStatus::Inconclusive;
  }
  return run;
}

namespace {

bool better(const DescentRun& a, const DescentRun& b) {
  const auto rank = [](MinimizeStatus s) {
    switch (s) {
      case MinimizeStatus::Unbounded: return 0;
      case MinimizeStatus::Converged:
      case MinimizeStatus::Vanishing: return 1;
      default: return 2;
    }
  };
  if (rank(a.status) != rank(b.status)) return rank(a.status) < rank(b.status);
  return a.energy < b.energy;
}

}  // namespace

MinimizeReport minimize(const PeriodicSpec& s, const MinimizeOptions& opts) {
  opts.validate();
  require_valid(s);
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, opts.truncationN));
  const MeshPtr mesh = make_mesh(t, opts.meshH);

  MinimizeReport rep;
  rep.N = opts.truncationN;
  rep.h = opts.meshH;
  for (auto& [label, f] : initial_data(mesh, opts)) {
    rep.runs.push_back(descend(mesh, f, opts, label));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.runs.size(); ++i) {
    if (better(rep.runs[i], rep.runs[best])) best = i;
  }
  const DescentRun& run = rep.runs[best];
  if (run.status == MinimizeStatus::Inconclusive) {
    std::ostringstream msg;
    msg << "minimize: no start reached a verdict (p=" << opts.p << ", mu=" << opts.mu << ", N=" << opts.truncationN
        << ", h=" << opts.meshH << ")";
    for (const auto& r : rep.runs) {
      msg << "\n  " << r.start << ": iters=" << r.iterations << " energy=" << r.energy
          << " grad=" << r.gradNorm << " tail=" << r.tailMass;
    }
    throw InconclusiveError(msg.str());
  }

  rep.status = run.status;
  rep.start = run.start;
  rep.history = run.history;
  rep.iterations = run.iterations;
  rep.gradNorm = run.gradNorm;
  rep.tailMass = run.tailMass;
  rep.u = run.status == MinimizeStatus::Unbounded ? run.u : recentered(run.u, opts.mu);
  rep.energy = run.energy;
  rep.kinetic = run.kinetic;
  rep.sup = sup_norm(rep.u);
  rep.mass = l2_mass(rep.u);
  if (run.status == MinimizeStatus::Unbounded) {
    rep.groundStateEnergy = -std::numeric_limits<double>::infinity();
    rep.note = "energy unbounded below";
    return rep;
  }
  const ElResidual el = el_residual(run.u, opts.p);
  rep.lambda = el.lambda;
  rep.interiorResidual = el.interiorResidual;
  rep.kirchhoffMax = el.kirchhoffMax;
  rep.groundStateEnergy = run.status == MinimizeStatus::Converged ? run.energy : 0.0;

  if (opts.checkResolution && opts.p == 6.0 && run.status == MinimizeStatus::Converged) {
    const MeshPtr fine = make_mesh(t, 0.5 * opts.meshH);
    const DescentRun refined = descend(fine, transfer(rep.u, fine), opts, "resolution");
    rep.resolutionEnergy = refined.energy;
    if (refined.status == MinimizeStatus::Unbounded || refined.energy < run.energy - 0.25 * std::abs(run.energy)) {
      rep.status = MinimizeStatus::Unbounded;
      rep.groundStateEnergy = -std::numeric_limits<double>::infinity();
      std::ostringstream note;
      note << "energy unbounded below: halving h moved the energy from " << run.energy << " to " << refined.energy;
      rep.note = note.str();
      return rep;
    }
  }

  if (opts.checkStability) {
    const auto t2 = std::make_shared<const TruncatedGraph>(build_truncation(s, opts.truncationN + 2));
    const MeshPtr mesh2 = make_mesh(t2, opts.meshH);
    const DescentRun wider = descend(mesh2, transfer(rep.u, mesh2), opts, "stability");
    rep.stabilityEnergy = wider.energy;
    std::ostringstream note;
    if (run.status == MinimizeStatus::Vanishing && std::abs(wider.energy) > std::abs(run.energy) + 1e-9) {
      rep.status = MinimizeStatus::Inconclusive;
      note << "energy magnitude grew on the N+2 truncation (" << run.energy << " -> " << wider.energy << ")";
    } else if (run.status == MinimizeStatus::Converged && std::abs(wider.energy - run.energy) > 1e-6) {
      note << "energy moved by " << std::abs(wider.energy - run.energy) << " on the N+2 truncation";
    }
    rep.note = note.str();
  }
  return rep;
}

std::vector<SweepRow> sweep(const PeriodicSpec& s, double p, const std::vector<double>& muGrid,
                            const MinimizeOptions& opts) {
  for (std::size_t i = 0; i < muGrid.size(); ++i) {
    if (!(muGrid[i] > 0.0) || (i > 0 && !(muGrid[i] > muGrid[i - 1]))) {
      throw InputError("sweep: mu grid must be strictly increasing and positive");
    }
  }
  std::vector<SweepRow> rows;
  for (double mu : muGrid) {
    MinimizeOptions o = opts;
    o.p = p;
    o.mu = mu;
    SweepRow row;
    row.mu = mu;
    row.N = o.truncationN;
    row.h = o.meshH;
    try {
      const MinimizeReport rep = minimize(s, o);
      row.status = rep.status;
      row.energy = rep.energy;
      row.kinetic = rep.kinetic;
      row.sup = rep.sup;
      row.lambda = rep.lambda;
      row.iterations = rep.iterations;
      row.supCell = argmax_cell(rep.u);
      row.note = rep.note;
    } catch (const InconclusiveError& e) {
      row.status = MinimizeStatus::Inconclusive;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "mu,status,energy,kinetic,sup,lambda,iters,N,h\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g\n", r.mu, to_string(r.status),
                  r.energy, r.kinetic, r.sup, r.lambda, r.iterations, r.N, r.h);
    out << buf;
  }
}

}  // namespace pergraph
