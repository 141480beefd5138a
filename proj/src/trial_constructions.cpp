#include "pergraph/trial_constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "pergraph/corpus.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/rearrangement.hpp"

namespace pergraph {

SubcriticalLayout subcritical_layout(const PeriodicSpec& s) {
  const std::set<VertexIndex> donors(s.donors.begin(), s.donors.end());
  SubcriticalLayout layout;
  layout.ell = std::numeric_limits<double>::infinity();
  for (EdgeIndex e = 0; e < s.cell.edge_count(); ++e) {
    const Edge& ed = s.cell.edge(e);
    const bool dv = donors.count(ed.v) != 0;
    const bool dw = donors.count(ed.w) != 0;
    if (dv != dw) {
      layout.lEdges.push_back(e);
      layout.ell = std::min(layout.ell, ed.length);
    } else if (dv && dw) {
      layout.ddEdges.push_back(e);
    }
  }
  if (layout.lEdges.empty()) throw InputError("no cell edge has exactly one endpoint in D");
  layout.gamma = s.cell.total_length() - double(layout.m()) * layout.ell;
  return layout;
}

namespace {

struct SubcriticalSampler {
  const PeriodicSpec& spec;
  const SubcriticalLayout& layout;
  const SolitonParams& sol;
  std::vector<int> kind;       // 0 plateau, 1 stub edge, 2 donor-donor edge
  std::vector<bool> startsAtDonor;

  SubcriticalSampler(const PeriodicSpec& s, const SubcriticalLayout& l, const SolitonParams& p)
      : spec(s), layout(l), sol(p), kind(s.cell.edge_count(), 0), startsAtDonor(s.cell.edge_count(), false) {
    const std::set<VertexIndex> donors(s.donors.begin(), s.donors.end());
    for (EdgeIndex e : l.lEdges) {
      kind[e] = 1;
      startsAtDonor[e] = donors.count(s.cell.edge(e).v) != 0;
    }
    for (EdgeIndex e : l.ddEdges) kind[e] = 2;
  }

  GraphFunction operator()(MeshPtr mesh, double mu1) const {
    const TruncatedGraph& t = mesh->owner();
    const double ell = layout.ell;
    return sample(mesh, [&](EdgeIndex e, double x) {
      const EdgeIndex o = t.edgeOrbit[e];
      const int i = t.edgeCell[e];
      switch (kind[o]) {
        case 1: {
          const double fromDonor = startsAtDonor[o] ? x : spec.cell.edge(o).length - x;
          if (fromDonor >= ell) return sol.phi(mu1, i * ell);
          return sol.phi(mu1, (i + 1) * ell - fromDonor);
        }
        case 2: return sol.phi(mu1, (i + 1) * ell);
        default: return sol.phi(mu1, i * ell);
      }
    }, 1e-9 * std::max(1.0, sol.phi(mu1, 0.0)));
  }
};

double soliton_energy_on_line(const SolitonParams& sol, double mu) {
  const double k = 2.0 / (sol.p - 2.0);
  const double scale = std::pow(mu, sol.beta);
  const double amp = std::pow(mu, sol.alpha);
  const double reach = 45.0 / (k * sol.a * scale);
  const auto dens = [&](double x) {
    const double y = sol.a * scale * x;
    const double sech = 1.0 / std::cosh(y);
    const double value = amp * sol.A * std::pow(sech, k);
    const double slope = -amp * sol.A * k * sol.a * scale * std::pow(sech, k) * std::tanh(y);
    return 0.5 * slope * slope - std::pow(value, sol.p) / sol.p;
  };
  return 2.0 * simpson(dens, 0.0, reach, 200000);
}

double tail_mass(const SolitonParams& sol, const SubcriticalLayout& l, double mu1, int N) {
  // Mass of cells beyond +-N: plateau plus the soliton piece carried by each stub.
  double tail = 0.0;
  for (int j = N + 1; j < N + 400; ++j) {
    const double plateau = sol.phi(mu1, j * l.ell);
    const double stub = sol.phi(mu1, j * l.ell);
    const double add = 2.0 * (l.gamma * plateau * plateau + double(l.m()) * l.ell * stub * stub);
    tail += add;
    if (add < 1e-18) break;
  }
  return tail;
}

}  // namespace

SubcriticalTrial subcritical_trial(const PeriodicSpec& s, double p, double mu, double h, int N) {
  if (!(mu > 0.0)) throw InputError("subcritical_trial: mass must be positive");
  require_valid(s);
  SubcriticalTrial out;
  out.layout = subcritical_layout(s);
  out.soliton = soliton_params(p);
  const SubcriticalSampler sampler(s, out.layout, out.soliton);

  const bool automatic = N <= 0;
  int cells = automatic ? 2 : N;
  while (true) {
    const MeshPtr mesh = make_mesh(build_truncation(s, cells), h);
    const auto mass_of = [&](double mu1) { return l2_mass(sampler(mesh, mu1)); };
    double lo = 1e-6 * mu, hi = 1e3 * mu;
    const double mlo = mass_of(lo), mhi = mass_of(hi);
    if (!(mlo < mu && mhi > mu)) {
      std::ostringstream msg;
      msg << "subcritical_trial: mass calibration bracket failed; mass(" << lo << ") = " << mlo
          << ", mass(" << mu << ") = " << mass_of(mu) << ", mass(" << hi << ") = " << mhi;
      throw InputError(msg.str());
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass_of(mid) < mu ? lo : hi) = mid;
      if (hi - lo < 1e-13 * hi) break;
    }
    out.mu1 = 0.5 * (lo + hi);
    if (!automatic || tail_mass(out.soliton, out.layout, out.mu1, cells) < 1e-9) {
      out.u = sampler(mesh, out.mu1);
      out.N = cells;
      break;
    }
    cells += std::max(2, cells / 2);
  }

  double plateauEnergy = 0.0;
  double ddLength = 0.0;
  for (EdgeIndex e : out.layout.ddEdges) ddLength += s.cell.edge(e).length;
  for (int i = -out.N; i <= out.N; ++i) {
    const double plateau = out.soliton.phi(out.mu1, i * out.layout.ell);
    const double dd = out.soliton.phi(out.mu1, (i + 1) * out.layout.ell);
    plateauEnergy -= ((out.layout.gamma - ddLength) * std::pow(plateau, p) + ddLength * std::pow(dd, p)) / p;
  }
  out.decomposedEnergy =
      double(out.layout.m()) * soliton_energy_on_line(out.soliton, out.mu1) + plateauEnergy;
  return out;
}

VanishingTrial vanishing_sequence(MeshPtr mesh, const PeriodicSpec& s, double mu, int n) {
  if (!(mu > 0.0)) throw InputError("vanishing_sequence: mass must be positive");
  if (n < 0) throw InputError("vanishing_sequence: n must be nonnegative");
  const TruncatedGraph& t = mesh->owner();
  if (t.firstCell > -(n + 1) || t.lastCell < n + 1) {
    throw InputError("vanishing_sequence: truncation must contain cells -(n+1)..n+1");
  }
  (void)s;
  std::vector<bool> plateauVertex(t.graph.vertex_count(), false);
  for (int i = -n; i <= n; ++i) {
    for (VertexIndex v = 0; v < t.cellVertexCount; ++v) plateauVertex[t.merged(i, v)] = true;
  }
  // Shape with unit plateau; mass is then quadratic in the plateau height.
  const auto shape = [&](EdgeIndex e, double x) -> double {
    if (std::abs(t.edgeCell[e]) <= n) return 1.0;
    const Edge& ed = t.graph.edge(e);
    const bool a = plateauVertex[ed.v];
    const bool b = plateauVertex[ed.w];
    if (a && b) return 1.0;
    if (a) return (ed.length - x) / ed.length;
    if (b) return x / ed.length;
    return 0.0;
  };
  double measure = 0.0;
  for (EdgeIndex e = 0; e < t.graph.edge_count(); ++e) {
    const Edge& ed = t.graph.edge(e);
    const bool a = plateauVertex[ed.v];
    const bool b = plateauVertex[ed.w];
    if (std::abs(t.edgeCell[e]) <= n || (a && b)) {
      measure += ed.length;
    } else if (a || b) {
      measure += ed.length / 3.0;
    }
  }
  VanishingTrial out;
  out.n = n;
  out.alpha = std::sqrt(mu / measure);
  out.u = sample(mesh, [&](EdgeIndex e, double x) { return out.alpha * shape(e, x); });
  return out;
}

namespace {

/// Critical energy of v on [0.5 - w, 0.5 + w], outside of which v vanishes.
double base_energy(const std::function<double(double)>& v, const std::function<double(double)>& dv,
                   double w = 0.5) {
  return simpson([&](double x) { return 0.5 * dv(x) * dv(x) - std::pow(v(x), 6) / 6.0; }, 0.5 - w, 0.5 + w,
                 20000);
}

}  // namespace

ConcentratingBump concentrating_bump(MeshPtr mesh, EdgeIndex edge, double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0)) throw InputError("concentrating_bump: mu and lambda must be positive");
  const CompactGraph& g = mesh->graph();
  if (edge >= g.edge_count()) throw InputError("concentrating_bump: unknown edge");
  const double len = g.edge(edge).length;
  if (1.0 / lambda > len) throw InputError("concentrating_bump: support 1/lambda exceeds the edge");

  ConcentratingBump out;
  // Polynomial profile x^2 (1 - x)^2 with unit-mass constant sqrt(630).
  double amp = std::sqrt(630.0 * mu);
  std::function<double(double)> v = [&amp](double x) { return amp * x * x * (1 - x) * (1 - x); };
  std::function<double(double)> dv = [&amp](double x) { return amp * 2.0 * x * (1 - x) * (1 - 2 * x); };
  out.baseEnergy = base_energy(v, dv);
  const CriticalSoliton phi(1.0);
  if (out.baseEnergy >= 0.0) {
    // Fall back to a clipped critical soliton, narrowed until the energy turns negative.
    for (double kappa = 4.0; kappa <= 65536.0; kappa *= 2.0) {
      const double floor = phi(0.5 * kappa);
      const auto raw = [&phi, kappa, floor](double x) { return std::max(0.0, phi(kappa * (x - 0.5)) - floor); };
      const double w = std::min(0.5, 40.0 / kappa);
      const double m = simpson([&](double x) { return raw(x) * raw(x); }, 0.5 - w, 0.5 + w, 20000);
      const double scale = std::sqrt(mu / m);
      v = [raw, scale](double x) { return scale * raw(x); };
      dv = [&phi, kappa, scale](double x) { return scale * kappa * phi.derivative(kappa * (x - 0.5)); };
      out.baseEnergy = base_energy(v, dv, w);
      out.kappa = kappa;
      if (out.baseEnergy < 0.0) break;
    }
    if (out.baseEnergy >= 0.0) {
      throw InputError("concentrating_bump: no negative-energy profile at this mass (mu <= mu_R?)");
    }
  }
  const double x0 = 0.5 * (len - 1.0 / lambda);
  const double root = std::sqrt(lambda);
  out.u = sample(mesh, [&](EdgeIndex e, double x) {
    if (e != edge) return 0.0;
    const double y = lambda * (x - x0);
    return (y <= 0.0 || y >= 1.0) ? 0.0 : root * v(y);
  });
  return out;
}

SignpostTrial signpost_trial(const SignpostParams& sp, double lambda, double h, int N) {
  const double gamma = sp.gammaHalf, beta = sp.betaHalf, delta = sp.delta;
  if (!(gamma > 0.0 && beta > 0.0 && delta > 0.0)) throw InputError("signpost_trial: parameters must be positive");
  if (!(lambda > 0.0)) throw InputError("signpost_trial: lambda must be positive");
  if (h > std::min(0.01, 0.25 / lambda) * (1.0 + 1e-12)) {
    throw InputError("signpost_trial: mesh too coarse for lambda (need h <= min(0.01, 1/(4 lambda)))");
  }
  const CriticalSoliton phi(lambda);
  const double edgeOut = gamma + beta;
  if (N <= 0) {
    N = 1;
    while (phi(edgeOut + N * delta) > 1e-9 * std::sqrt(lambda)) ++N;
  }
  const PeriodicSpec spec = corpus::signpost(gamma, beta, delta);
  const EdgeIndex circle = *spec.cell.find_edge("Gamma");
  const EdgeIndex bridge = *spec.cell.find_edge("B");
  const EdgeIndex horizontal = *spec.cell.find_edge("H");
  auto t = std::make_shared<const TruncatedGraph>(build_truncation(spec, N));
  const MeshPtr mesh = make_mesh(t, h);

  // Decreasing rearrangement of phi on I = (-gamma-beta, -gamma) u (gamma, gamma+beta),
  // sampled at half the bridge spacing so its knots land on the bridge nodes.
  const std::size_t nb = mesh->nodes_on_edge(t->edge_of(0, bridge));
  const MeshPtr meshI = std::make_shared<const Mesh>(path_graph({beta, beta}), std::vector<std::size_t>{nb, nb});
  const GraphFunction onI = sample(meshI, [&](EdgeIndex e, double x) {
    return e == 0 ? phi(-gamma - beta + x) : phi(gamma + x);
  });
  const LineFunction bStar = decreasing_rearrangement_to_halfline(onI);

  SignpostTrial out;
  out.N = N;
  const double tol = 1e-9 * std::sqrt(lambda);
  out.w = sample(mesh, [&](EdgeIndex e, double x) {
    const int i = t->edgeCell[e];
    const EdgeIndex o = t->edgeOrbit[e];
    if (o == horizontal) {
      return i >= 0 ? phi(edgeOut + i * delta + x) : phi(-edgeOut + i * delta + x);
    }
    if (i != 0) return phi(edgeOut + std::abs(i) * delta);
    if (o == circle) return phi(x - gamma);
    return bStar(x);
  }, tol);
  const double massW = l2_mass(out.w);
  out.u = rescale_to_mass(out.w, mu_R);
  out.r = 1.0 - mu_R / massW;
  const double cPlusDelta = sp.c() + delta;
  out.rAsymptotic = lambda / (std::exp(2.0 / std::numbers::sqrt3 * lambda * cPlusDelta) * mu_R + lambda);

  out.q = simpson([&](double x) { return phi.derivative(x) * phi.derivative(x); }, gamma, gamma + beta, 200000);
  const auto antiderivative = [](double z) { return std::atan(std::tanh(0.5 * z)) - 0.5 * std::tanh(z) / std::cosh(z); };
  const double z0 = 2.0 / std::numbers::sqrt3 * lambda * gamma;
  const double z1 = 2.0 / std::numbers::sqrt3 * lambda * (gamma + beta);
  out.qClosedForm = std::numbers::sqrt3 / 2.0 * lambda * lambda * (antiderivative(z1) - antiderivative(z0));
  for (int i = 1; i < 100000; ++i) {
    const double add = std::pow(phi(edgeOut + i * delta), 6);
    out.tailSum6 += add;
    if (add < 1e-300) break;
  }
  out.energyUpperBound = (1.0 - out.r) * (-0.75 * out.q - sp.c() / 3.0 * out.tailSum6) +
                         0.5 * out.r * lp_power(out.w, 6.0);

  out.circle0.assign(t->graph.edge_count(), false);
  out.bridge0.assign(t->graph.edge_count(), false);
  out.circle0[t->edge_of(0, circle)] = true;
  out.bridge0[t->edge_of(0, bridge)] = true;
  return out;
}

}  // namespace pergraph
