// Acceptance checks. One PASS/FAIL line per criterion; details are indented.
// Usage: acceptance [criterion ...]   (default: all nine)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "pergraph/corpus.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/gn_estimator.hpp"
#include "pergraph/nls_minimizer.hpp"
#include "pergraph/periodic_builder.hpp"
#include "pergraph/rearrangement.hpp"
#include "pergraph/solitons.hpp"
#include "pergraph/topology.hpp"
#include "pergraph/trial_constructions.hpp"

using namespace pergraph;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::vector<std::string> failures;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

// Energy histories of every minimize run made by this binary.
struct HistoryAudit {
  int runs = 0;
  std::vector<std::string> violations;

  void add(const MinimizeReport& r, const std::string& tag) {
    for (const DescentRun& d : r.runs) {
      ++runs;
      for (std::size_t i = 1; i < d.history.size(); ++i) {
        if (d.history[i].energy > d.history[i - 1].energy) {
          violations.push_back(tag + "/" + d.start);
          break;
        }
      }
    }
  }
} audit;

MinimizeReport run_minimize(const PeriodicSpec& s, const MinimizeOptions& o, const std::string& tag) {
  MinimizeReport r = minimize(s, o);
  audit.add(r, tag);
  return r;
}

// ---------------------------------------------------------------------------

Verdict threshold_constants() {
  Verdict v;
  const CriticalSoliton phi(1.0);
  const GraphFunction u = sample_on_line(-60.0, 60.0, 0.005, [&](double x) { return phi(x); });
  const double mass = l2_mass(u);
  const double q = gn_quotient(u, 6.0);
  const double line = 4.0 / (std::numbers::pi * std::numbers::pi);
  std::printf("  sampled mass %.12f, sqrt(3) pi / 2 = %.12f, diff %.2e\n", mass, mu_R, mass - mu_R);
  std::printf("  gn_quotient %.10f, 4/pi^2 = %.10f, rel %.2e\n", q, line, q / line - 1.0);
  v.require(std::abs(mass - mu_R) <= 1e-5, "critical soliton mass");
  v.require(std::abs(q / line - 1.0) <= 0.01, "quotient of the critical soliton");
  return v;
}

Verdict subcritical_existence() {
  Verdict v;
  const std::vector<PeriodicSpec> specs = {corpus::ladder(), corpus::circles_and_segments()};
  for (const PeriodicSpec& s : specs) {
    for (double p : {3.0, 4.0, 5.0}) {
      for (double mu : {0.5, 1.0, 2.0}) {
        const auto t0 = Clock::now();
        char tag[96];
        std::snprintf(tag, sizeof tag, "%s p=%g mu=%g", s.name.c_str(), p, mu);
        const TruncationAdvice a = suggest_discretization(s, p, mu, 1.0);
        MinimizeOptions o;
        o.p = p;
        o.mu = mu;
        o.truncationN = a.N;
        o.meshH = std::clamp(a.width / 64.0, 0.02, 1.0);
        o.gradTol = 1e-9;
        o.maxIters = 50000;
        try {
          const MinimizeReport r = run_minimize(s, o, tag);
          const SubcriticalTrial trial = subcritical_trial(s, p, mu, r.h, r.N);
          const double eTrial = energy(trial.u, p);
          const double dN = std::abs(r.stabilityEnergy - r.energy);
          const double secs = seconds_since(t0);
          std::printf("  %-34s N=%-6d h=%-6.3g %-9s E=%.10e trial=%.10e kirch=%.1e dN=%.1e %.1fs\n", tag, r.N, r.h,
                      to_string(r.status), r.energy, eTrial, r.kirchhoffMax, dN, secs);
          v.require(r.status == MinimizeStatus::Converged, std::string(tag) + " not Converged");
          v.require(r.energy < 0.0, std::string(tag) + " energy not negative");
          v.require(r.energy <= eTrial + 1e-6, std::string(tag) + " above the subcritical trial");
          v.require(r.kirchhoffMax <= 10.0 * o.gradTol, std::string(tag) + " Kirchhoff residual");
          v.require(dN <= 1e-6, std::string(tag) + " N-stability");
          v.require(secs <= 120.0, std::string(tag) + " runtime over 2 min");
        } catch (const InconclusiveError& e) {
          std::printf("  %-34s N=%-6d inconclusive (%.1fs)\n%s\n", tag, o.truncationN, seconds_since(t0), e.what());
          v.require(false, std::string(tag) + " inconclusive");
        }
      }
    }
  }
  return v;
}

Verdict critical_ladder() {
  Verdict v;
  const PeriodicSpec s = corpus::ladder();

  MinimizeOptions o;
  o.p = 6.0;
  o.mu = 0.8 * mu_R;
  o.truncationN = 40;
  o.meshH = 0.05;
  o.gradTol = 1e-8;
  {
    const MinimizeReport r = run_minimize(s, o, "ladder 0.8muR");
    std::printf("  mu = 0.8 muR: %s, E = %.3e (N=%d h=%g, start %s)\n", to_string(r.status), r.energy, r.N, r.h,
                r.start.c_str());
    v.require(r.status == MinimizeStatus::Vanishing, "0.8 muR not Vanishing");
    v.require(std::abs(r.energy) <= 1e-4, "0.8 muR final energy above 1e-4");
  }

  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 17));
  const MeshPtr mesh = make_mesh(t, 0.05);
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double last = 0.0;
  for (int n : {1, 2, 4, 8, 16}) {
    const VanishingTrial vt = vanishing_sequence(mesh, s, 0.8 * mu_R, n);
    last = energy(vt.u, 6.0);
    std::printf("  vanishing sequence n=%-2d alpha=%.5f E=%.6e\n", n, vt.alpha, last);
    decreasing = decreasing && last < prev;
    prev = last;
  }
  v.require(decreasing, "vanishing sequence energies not decreasing");
  v.require(last <= 1e-4, "vanishing sequence energy at n=16 above 1e-4");

  o.mu = 1.2 * mu_R;
  o.truncationN = 4;
  o.checkStability = false;
  {
    const MinimizeReport r = run_minimize(s, o, "ladder 1.2muR");
    std::printf("  mu = 1.2 muR: %s, last E = %.3e (start %s)\n", to_string(r.status), r.energy, r.start.c_str());
    v.require(r.status == MinimizeStatus::Unbounded, "1.2 muR not Unbounded");
  }
  const EdgeIndex rung = t->edge_of(0, *s.cell.find_edge("rung"));
  double e4 = 0.0;
  for (double lambda : {4.0, 8.0}) {
    const MeshPtr fine = make_mesh(t, 1.0 / (128.0 * lambda));
    const ConcentratingBump b = concentrating_bump(fine, rung, 1.2 * mu_R, lambda);
    const double e = energy(b.u, 6.0);
    std::printf("  bump lambda=%g: E = %.6f (lambda^2 E(v) = %.6f)\n", lambda, e, lambda * lambda * b.baseEnergy);
    if (lambda == 4.0) e4 = e;
    else {
      const double ratio = e / e4;
      std::printf("  E(8)/E(4) = %.6f (expected 4)\n", ratio);
      v.require(e < -10.0, "bump energy not below -10");
      v.require(std::abs(ratio / 4.0 - 1.0) <= 0.01, "bump energy not scaling as lambda^2");
    }
  }
  return v;
}

Verdict terminal_edge() {
  Verdict v;
  const PeriodicSpec s = corpus::pendant();
  GNOptions g;
  g.meshH = 0.02;
  g.truncationN = 4;
  const GNReport gn = estimate_cg(s, g);
  std::printf("  muG estimate %.6f (refined %.6f), muR+ = %.6f, rel %.2e\n", gn.muGEstimate, gn.refinedMuG, mu_R_plus,
              gn.refinedMuG / mu_R_plus - 1.0);
  v.require(std::abs(gn.refinedMuG / mu_R_plus - 1.0) <= 0.02, "muG estimate not within 2% of muR+");

  MinimizeOptions o;
  o.p = 6.0;
  o.truncationN = 20;
  o.meshH = 0.05;
  o.gradTol = 1e-8;
  const auto run_at = [&](double mu, const char* label) {
    o.mu = mu;
    try {
      const MinimizeReport r = run_minimize(s, o, label);
      std::printf("  %-10s mu=%.4f: %s, E = %.3e (start %s)\n", label, mu, to_string(r.status), r.energy,
                  r.start.c_str());
      return r.status;
    } catch (const InconclusiveError&) {
      std::printf("  %-10s mu=%.4f: Inconclusive\n", label, mu);
      return MinimizeStatus::Inconclusive;
    }
  };
  v.require(run_at(0.9 * mu_R_plus, "0.9 muR+") == MinimizeStatus::Vanishing, "0.9 muR+ not Vanishing");
  v.require(run_at(1.1 * mu_R_plus, "1.1 muR+") == MinimizeStatus::Unbounded, "1.1 muR+ not Unbounded");
  v.require(run_at(1.1 * mu_R, "1.1 muR") == MinimizeStatus::Unbounded, "1.1 muR not Unbounded");
  return v;
}

Verdict signpost_window() {
  Verdict v;
  const auto t0 = Clock::now();
  const SignpostTrial tr = signpost_trial(SignpostParams{}, 20.0, 3.125e-4);
  const double e = energy(tr.u, 6.0);
  std::printf("  signpost trial lambda=20: E = %.6e, mass = %.10f, bound %.6e, r = %.3e, N = %d\n", e,
              l2_mass(tr.u), tr.energyUpperBound, tr.r, tr.N);
  v.require(e < 0.0, "signpost trial energy not negative");

  const PeriodicSpec s = corpus::signpost();
  GNOptions g;
  g.meshH = 0.02;
  g.truncationN = 4;
  const GNReport gn = estimate_cg(s, g);
  const double muG = gn.refinedMuG;
  std::printf("  muG estimate %.6f = %.4f muR (refined at h=%g, N=%d)\n", muG, muG / mu_R, gn.refinedH, gn.refinedN);
  v.require(muG < 0.98 * mu_R, "muG estimate not 2% below muR");

  const double lo = 1.02 * muG, hi = 0.98 * mu_R;
  std::vector<double> grid = {0.9 * muG};
  for (int i = 0; i < 5; ++i) grid.push_back(lo + (hi - lo) * i / 4.0);
  grid.push_back(1.05 * mu_R);
  MinimizeOptions o;
  o.truncationN = 6;
  o.meshH = 0.02;
  o.gradTol = 1e-8;
  const std::vector<SweepRow> rows = sweep(s, 6.0, grid, o);
  bool band = false;
  for (const SweepRow& r : rows) {
    std::printf("  sweep mu=%.4f (%.3f muR): %-12s E=%.6e sup=%.4f supCell=%d\n", r.mu, r.mu / mu_R,
                to_string(r.status), r.energy, r.sup, r.supCell);
    if (r.mu >= lo && r.mu <= hi && r.status == MinimizeStatus::Converged && r.supCell == 0) band = true;
  }
  const double secs = seconds_since(t0);
  std::printf("  %.1fs\n", secs);
  v.require(band, "no localized Converged state inside the window");
  v.require(secs <= 600.0, "runtime over 10 min");
  return v;
}

Verdict normalization() {
  Verdict v;
  const NormalizationResult star = normalize_pasting(corpus::starlike());
  std::printf("  star-like example: %s\n", to_string(star.outcome));
  v.require(star.outcome == NormalizationResult::Outcome::StarLike, "star-like example not StarLike");
  const PeriodicSpec raw = corpus::nonbijective();
  const NormalizationResult nb = normalize_pasting(raw);
  std::printf("  non-bijective example: %s, cell multiplier %d\n", to_string(nb.outcome), nb.cellMultiplier);
  v.require(nb.outcome == NormalizationResult::Outcome::Normalized, "non-bijective example not Normalized");
  for (int N : {1, 2, 3}) {
    const bool eq = normalization_consistent(raw, nb, N);
    std::printf("  N=%d: rewritten truncation equals raw gluing: %s\n", N, eq ? "yes" : "no");
    v.require(eq, "graphs differ at N=" + std::to_string(N));
  }
  const int m = nb.cellMultiplier;
  const bool four = graphs_equal(glue_cells(nb.spec, 0, 3).graph, glue_cells(raw, 0, 4 * m - 1).graph).has_value();
  std::printf("  4-cell window: rewritten equals raw: %s\n", four ? "yes" : "no");
  v.require(four, "4-cell window differs");
  return v;
}

Verdict topology() {
  Verdict v;
  const TopologyClass ladder = classify(corpus::ladder());
  const TopologyClass pendant = classify(corpus::pendant());
  const PeriodicSpec sign = corpus::signpost();
  const TopologyClass ts = classify(sign);
  std::set<std::string> cut;
  for (EdgeIndex e : ts.cutEdges) cut.insert(sign.cell.edge(e).id);
  std::printf("  ladder %s, pendant %s, signpost %s with %zu cut edge(s)\n", to_string(ladder.kind),
              to_string(pendant.kind), to_string(ts.kind), cut.size());
  v.require(ladder.kind == TopologyClass::Kind::HPer, "ladder");
  v.require(pendant.kind == TopologyClass::Kind::TerminalEdge, "pendant");
  v.require(ts.kind == TopologyClass::Kind::Neither && cut == std::set<std::string>{"B"}, "signpost");

  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(sign, 3));
  const MeshPtr m = make_mesh(t, 0.01);
  const EdgeIndex bridge = *sign.cell.find_edge("B");
  std::vector<bool> mask(t->graph.edge_count());
  for (EdgeIndex e = 0; e < mask.size(); ++e) mask[e] = t->edgeOrbit[e] == bridge;
  double worst = 0.0;
  for (double lambda : {0.5, 2.0, 8.0}) {
    const CriticalSoliton phi(lambda);
    const GraphFunction d = distance_from(m, t->merged(0, *sign.cell.find_vertex("s")));
    const GraphFunction u{m, d.values.unaryExpr([&](double x) { return phi(x); })};
    const auto [t2, w] = double_cut_edges(u, {bridge});
    worst = std::max(worst, std::abs(kinetic(w) / kinetic(u) - 1.0));
    for (double q : {2.0, 6.0}) {
      const double expected = lp_power(u, q) + 3.0 * lp_power(u, q, mask);
      worst = std::max(worst, std::abs(lp_power(w, q) / expected - 1.0));
    }
  }
  std::printf("  doubling identities: worst relative deviation %.2e\n", worst);
  v.require(worst <= 1e-8, "doubling identities");
  return v;
}

double brute_measure(const GraphFunction& u, double t) {
  const Mesh& m = *u.mesh;
  double total = 0.0;
  for (EdgeIndex e = 0; e < m.graph().edge_count(); ++e) {
    const double h = m.spacing(e);
    for (std::size_t j = 0; j + 1 < m.nodes_on_edge(e); ++j) {
      const double a = std::abs(u.values[Eigen::Index(m.node(e, j))]);
      const double b = std::abs(u.values[Eigen::Index(m.node(e, j + 1))]);
      const double lo = std::min(a, b), hi = std::max(a, b);
      if (t < lo) total += h;
      else if (t < hi) total += h * (hi - t) / (hi - lo);
    }
  }
  return total;
}

Verdict numerics() {
  Verdict v;
  for (double p : {3.0, 4.0, 5.0}) {
    const SolitonParams sp = soliton_params(p);
    const double L = 40.0 / (sp.a * 2.0 / (p - 2.0));
    std::vector<double> hs = {0.04, 0.02, 0.01}, rs;
    for (double h : hs) {
      const GraphFunction u = sample_on_line(-L, L, h, [&](double x) { return sp.phi(1.0, x); });
      rs.push_back(el_residual(u, p).interiorResidual);
    }
    // Least-squares slope of log r against log h.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double x = std::log(hs[i]), y = std::log(rs[i]);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    std::printf("  residual p=%g: %.3e %.3e %.3e, slope %.3f\n", p, rs[0], rs[1], rs[2], slope);
    v.require(slope >= 1.9, "residual slope at p=" + std::to_string(p));
  }

  const PeriodicSpec s = corpus::circles_and_segments();
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 2));
  const MeshPtr m = make_mesh(t, 0.01);
  const CriticalSoliton phi(1.5);
  GraphFunction u = distance_from(m, t->merged(0, 0));
  u.values = u.values.unaryExpr([&](double x) { return phi(x); });
  for (Eigen::Index k = 0; k < u.values.size(); k += 7) u.values[k] *= 0.9;
  const LineFunction half = decreasing_rearrangement_to_halfline(u);
  const LineFunction line = symmetric_rearrangement_to_line(u);
  double worst = 0.0;
  for (double p : {2.0, 4.0, 6.0}) {
    const double oracle = simpson([&](double lv) { return p * std::pow(lv, p - 1.0) * brute_measure(u, lv); }, 0.0,
                                  sup_norm(u), 10000);
    worst = std::max({worst, std::abs(lp_power(half.u, p) / oracle - 1.0), std::abs(lp_power(line.u, p) / oracle - 1.0)});
  }
  std::printf("  rearrangements vs 10^4-level oracle: worst relative deviation %.2e\n", worst);
  v.require(worst <= 1e-6, "rearrangement norms");

  {
    MinimizeOptions o;
    o.p = 4.0;
    o.mu = 2.0;
    const TruncationAdvice a = suggest_discretization(corpus::ladder(), 4.0, 2.0, 0.1);
    o.truncationN = a.N;
    o.meshH = a.h;
    run_minimize(corpus::ladder(), o, "history check");
  }
  std::printf("  energy histories: %d runs, %zu with an increase\n", audit.runs, audit.violations.size());
  for (const auto& bad : audit.violations) std::printf("    %s\n", bad.c_str());
  v.require(audit.violations.empty(), "energy history increased");
  return v;
}

Verdict soliton_oracle() {
  Verdict v;
  // Independent bisection on lambda for u = A sech(a x), p = 4: mass 2 A^2 / a, A^2 = 2 lambda, a = sqrt(lambda).
  double lo = 1e-8, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (4.0 * mid / std::sqrt(mid) < 1.0 ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  const double aOracle = std::sqrt(lam), AOracle = std::sqrt(2.0 * lam);
  const SolitonParams s4 = soliton_params(4.0);
  std::printf("  a_4 = %.12f (oracle %.12f, exact 0.25); A_4 = %.12f (oracle %.12f, exact %.12f)\n", s4.a, aOracle,
              s4.A, AOracle, std::sqrt(2.0) / 4.0);
  v.require(std::abs(s4.a - 0.25) <= 1e-8 && std::abs(s4.a - aOracle) <= 1e-8, "a_4");
  v.require(std::abs(s4.A - std::sqrt(2.0) / 4.0) <= 1e-8 && std::abs(s4.A - AOracle) <= 1e-8, "A_4");
  double worst = 0.0;
  for (double p : {3.0, 4.0, 5.0}) {
    const SolitonParams sp = soliton_params(p);
    for (double mu : {0.5, 1.0, 2.0}) {
      const double L = 40.0 / (sp.a * std::pow(mu, sp.beta) * 2.0 / (p - 2.0));
      const GraphFunction u = sample_on_line(-L, L, L / 40000.0, [&](double x) { return sp.phi(mu, x); });
      worst = std::max(worst, std::abs(l2_mass(u) - mu));
    }
  }
  std::printf("  |mass - mu| worst over p in {3,4,5}, mu in {0.5,1,2}: %.2e\n", worst);
  v.require(worst <= 1e-6, "soliton masses");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"threshold constants", threshold_constants},
      {"subcritical existence on H_per graphs", subcritical_existence},
      {"critical phase diagram on the ladder", critical_ladder},
      {"terminal edge thresholds on the pendant", terminal_edge},
      {"existence window on the signpost", signpost_window},
      {"pasting-rule normalization", normalization},
      {"topology classes and doubling identities", topology},
      {"discretization, rearrangement and descent properties", numerics},
      {"soliton constants", soliton_oracle},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!selected.empty() && selected.count(id) == 0) continue;
    std::printf("criterion %d: %s\n", id, criteria[i].first);
    std::fflush(stdout);
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::string why;
    for (const auto& f : v.failures) why += (why.empty() ? "" : "; ") + f;
    std::printf("%s %d %s (%.1fs)%s%s\n", v.ok ? "PASS" : "FAIL", id, criteria[i].first, seconds_since(t0),
                why.empty() ? "" : ": ", why.c_str());
    std::fflush(stdout);
    if (!v.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
