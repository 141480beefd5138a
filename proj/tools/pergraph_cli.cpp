// pergraph: ground states of the NLS energy on periodic metric graphs.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input or spec, 3 inconclusive or star-like.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/gn_estimator.hpp"
#include "pergraph/nls_minimizer.hpp"
#include "pergraph/periodic_builder.hpp"
#include "pergraph/solitons.hpp"
#include "pergraph/spec_io.hpp"
#include "pergraph/topology.hpp"
#include "pergraph/trial_constructions.hpp"

#ifndef PERGRAPH_VERSION
#define PERGRAPH_VERSION "dev"
#endif

using namespace pergraph;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInconclusive = 3;

struct Options {
  std::string spec;
  double p = 4.0;
  double mu = 1.0;
  std::string muGrid;
  double meshH = 0.0;  // 0: command default
  int cells = -1;      // -1: command default, 0: automatic where supported
  int starts = 1;
  std::uint64_t seed = 1;
  bool normalize = false;
  std::string out = ".";
  bool dumpProfile = false;

  double gradTol = 1e-7;
  int maxIters = 20000;
  bool noStability = false;
  bool noRefine = false;
  bool skipEstimate = false;
  std::string kind;
  int n = 4;
  double lambda = 1.0;
  std::string edge;
  double halfWidth = 0.0;  // 0: wide enough for a 1e-13 tail
};

// JSON cannot hold inf or nan.
ojson num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::vector<double> parse_grid(const std::string& text) {
  double a = 0.0, b = 0.0;
  int steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> steps) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw InputError("--mu-grid: expected a:b:steps, got \"" + text + "\"");
  }
  if (steps < 1) throw InputError("--mu-grid: steps must be positive");
  if (steps == 1) return {a};
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) grid[std::size_t(i)] = a + (b - a) * double(i) / double(steps - 1);
  return grid;
}

class Run {
 public:
  Run(std::string command, const Options& o) : command_(std::move(command)), o_(o) {
    start_ = std::chrono::steady_clock::now();
    report_["command"] = command_;
    report_["tool"] = "pergraph";
    report_["version"] = PERGRAPH_VERSION;
    report_["inputHash"] = nullptr;
    std::filesystem::create_directories(o_.out);
  }

  /// Reads the spec file, hashing its bytes; applies --normalize.
  PeriodicSpec load() {
    const std::string text = read_file(o_.spec);
    report_["input"] = o_.spec;
    report_["inputHash"] = "fnv1a64:" + hex64(fnv1a64(text));
    PeriodicSpec s = parse_spec_text(text, o_.spec);
    if (!o_.normalize) return s;
    const NormalizationResult r = normalize_pasting(s);
    ojson& n = report_["normalization"];
    n["outcome"] = to_string(r.outcome);
    n["cellMultiplier"] = r.cellMultiplier;
    n["steps"] = r.steps;
    if (r.outcome == NormalizationResult::Outcome::StarLike) {
      n["cycle"] = r.cycle;
      throw StarLike();
    }
    return r.spec;
  }

  struct StarLike {};

  ojson& options() { return report_["options"]; }
  ojson& results() { return report_["results"]; }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream f(std::filesystem::path(o_.out) / name, std::ios::binary);
    if (!f) throw InputError("cannot write " + (std::filesystem::path(o_.out) / name).string());
    f << content;
  }

  void profile(const GraphFunction& u) const {
    std::ostringstream os;
    write_profile_csv(u, os);
    write("profile.csv", os.str());
  }

  void finish(const std::string& status) {
    report_["status"] = status;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report_["timing"]["seconds"] = secs;
    write("run_report.json", report_.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Options& o_;
  ojson report_;
  std::chrono::steady_clock::time_point start_;
};

ojson spec_summary(const PeriodicSpec& s) {
  ojson j;
  j["name"] = s.name;
  j["vertices"] = s.cell.vertex_count();
  j["edges"] = s.cell.edge_count();
  return j;
}

ojson row_json(const SweepRow& r) {
  ojson j;
  j["mu"] = r.mu;
  j["status"] = to_string(r.status);
  j["energy"] = num(r.energy);
  j["kinetic"] = num(r.kinetic);
  j["sup"] = num(r.sup);
  j["lambda"] = num(r.lambda);
  j["iters"] = r.iterations;
  j["N"] = r.N;
  j["h"] = r.h;
  j["supCell"] = r.supCell;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

int cmd_classify(const Options& o) {
  Run run("classify", o);
  const PeriodicSpec s = run.load();
  const WitnessPath w = require_valid(s);
  const TopologyClass tc = classify(s);
  const HPerVerdict hv = satisfies_h_per(s);

  ojson& r = run.results();
  r["spec"] = spec_summary(s);
  r["kind"] = to_string(tc.kind);
  r["terminalEdge"] = tc.terminalEdge ? ojson(s.cell.edge(*tc.terminalEdge).id) : ojson(nullptr);
  r["cutEdges"] = ojson::array();
  for (EdgeIndex e : tc.cutEdges) r["cutEdges"].push_back(s.cell.edge(e).id);
  r["hPer"]["satisfied"] = hv.satisfied;
  r["hPer"]["edge"] = hv.edge ? ojson(s.cell.edge(*hv.edge).id) : ojson(nullptr);
  r["hPer"]["component"] = hv.component;
  r["hPer"]["width"] = hv.width;
  r["witness"]["donor"] = s.cell.vertex_label(w.donor);
  r["witness"]["receiver"] = s.cell.vertex_label(w.receiver);
  r["witness"]["length"] = w.length;
  std::printf("kind=%s\n", to_string(tc.kind));

  if (o.skipEstimate) {
    run.finish("ok");
    return kExitOk;
  }
  GNOptions g;
  g.meshH = o.meshH > 0.0 ? o.meshH : 0.02;
  g.truncationN = o.cells > 0 ? o.cells : 4;
  g.starts = o.starts;
  g.seed = o.seed;
  g.refine = false;
  run.options()["meshH"] = g.meshH;
  run.options()["cells"] = g.truncationN;
  run.options()["starts"] = g.starts;
  run.options()["seed"] = g.seed;
  try {
    const GNReport gn = estimate_cg(s, g);
    r["gn"]["cgEstimate"] = gn.cgEstimate;
    r["gn"]["muGEstimate"] = gn.muGEstimate;
    r["gn"]["muGOverMuR"] = gn.muGEstimate / mu_R;
    r["gn"]["muGOverMuRPlus"] = gn.muGEstimate / mu_R_plus;
    std::printf("muG~%.6g (%.4f muR)\n", gn.muGEstimate, gn.muGEstimate / mu_R);
  } catch (const InconclusiveError& e) {
    r["gn"]["status"] = "Inconclusive";
    r["gn"]["message"] = e.what();
    run.finish("inconclusive");
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInconclusive;
  }
  run.finish("ok");
  return kExitOk;
}

MinimizeOptions minimize_options(const Options& o) {
  MinimizeOptions m;
  m.p = o.p;
  m.mu = o.mu;
  m.meshH = o.meshH > 0.0 ? o.meshH : 0.05;
  m.truncationN = o.cells > 0 ? o.cells : 8;
  m.starts = o.starts;
  m.seed = o.seed;
  m.gradTol = o.gradTol;
  m.maxIters = o.maxIters;
  m.checkStability = !o.noStability;
  return m;
}

ojson options_json(const MinimizeOptions& m) {
  ojson j;
  j["p"] = m.p;
  j["mu"] = m.mu;
  j["meshH"] = m.meshH;
  j["cells"] = m.truncationN;
  j["starts"] = m.starts;
  j["seed"] = m.seed;
  j["gradTol"] = m.gradTol;
  j["maxIters"] = m.maxIters;
  j["checkStability"] = m.checkStability;
  return j;
}

int cmd_minimize(const Options& o) {
  Run run("minimize", o);
  const PeriodicSpec s = run.load();
  MinimizeOptions m = minimize_options(o);
  m.validate();
  if (o.cells <= 0) {
    if (m.p < 6.0) {
      const TruncationAdvice a = suggest_discretization(s, m.p, m.mu, m.meshH);
      run.results()["advice"] = {{"N", a.N}, {"h", a.h}, {"width", a.width}, {"interiorOptimum", a.interiorOptimum}};
      if (a.interiorOptimum) {
        m.truncationN = a.N;
        m.meshH = a.h;
      }
    }
  }
  run.options() = options_json(m);

  MinimizeReport rep;
  try {
    rep = minimize(s, m);
  } catch (const InconclusiveError& e) {
    run.results()["message"] = e.what();
    SweepRow row;
    row.mu = m.mu;
    row.N = m.truncationN;
    row.h = m.meshH;
    std::ostringstream csv;
    write_sweep_csv({row}, csv);
    run.write("results.csv", csv.str());
    run.finish("Inconclusive");
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInconclusive;
  }

  SweepRow row;
  row.mu = m.mu;
  row.status = rep.status;
  row.energy = rep.energy;
  row.kinetic = rep.kinetic;
  row.sup = rep.sup;
  row.lambda = rep.lambda;
  row.iterations = rep.iterations;
  row.N = rep.N;
  row.h = rep.h;
  row.supCell = argmax_cell(rep.u);
  std::ostringstream csv;
  write_sweep_csv({row}, csv);
  run.write("results.csv", csv.str());
  if (o.dumpProfile) run.profile(rep.u);

  ojson& r = run.results();
  r["status"] = to_string(rep.status);
  r["energy"] = num(rep.energy);
  r["groundStateEnergy"] = num(rep.groundStateEnergy);
  r["kinetic"] = num(rep.kinetic);
  r["sup"] = num(rep.sup);
  r["mass"] = num(rep.mass);
  r["lambda"] = num(rep.lambda);
  r["interiorResidual"] = num(rep.interiorResidual);
  r["kirchhoffMax"] = num(rep.kirchhoffMax);
  r["gradNorm"] = num(rep.gradNorm);
  r["tailMass"] = num(rep.tailMass);
  r["iterations"] = rep.iterations;
  r["N"] = rep.N;
  r["h"] = rep.h;
  r["start"] = rep.start;
  r["supCell"] = row.supCell;
  r["stabilityEnergy"] = num(rep.stabilityEnergy);
  r["resolutionEnergy"] = num(rep.resolutionEnergy);
  if (!rep.note.empty()) r["note"] = rep.note;
  r["runs"] = ojson::array();
  for (const DescentRun& d : rep.runs) {
    r["runs"].push_back({{"start", d.start},
                         {"status", to_string(d.status)},
                         {"energy", num(d.energy)},
                         {"gradNorm", num(d.gradNorm)},
                         {"tailMass", num(d.tailMass)},
                         {"iterations", d.iterations}});
  }
  std::printf("status=%s energy=%.12g\n", to_string(rep.status), rep.energy);
  run.finish(to_string(rep.status));
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  Run run("sweep", o);
  const PeriodicSpec s = run.load();
  const MinimizeOptions m = minimize_options(o);
  const std::vector<double> grid = parse_grid(o.muGrid);
  MinimizeOptions check = m;
  check.mu = grid.front();
  check.validate();
  require_valid(s);
  run.options() = options_json(m);
  run.options().erase("mu");
  run.options()["muGrid"] = o.muGrid;

  const std::vector<SweepRow> rows = sweep(s, o.p, grid, m);
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  run.write("results.csv", csv.str());
  ojson& r = run.results();
  r["rows"] = ojson::array();
  for (const SweepRow& row : rows) {
    r["rows"].push_back(row_json(row));
    std::printf("mu=%.6g %s E=%.10g\n", row.mu, to_string(row.status), row.energy);
  }
  run.finish("ok");
  return kExitOk;
}

int cmd_gn(const Options& o) {
  Run run("gn-estimate", o);
  const PeriodicSpec s = run.load();
  GNOptions g;
  g.meshH = o.meshH > 0.0 ? o.meshH : 0.02;
  g.truncationN = o.cells > 0 ? o.cells : 4;
  g.starts = o.starts;
  g.seed = o.seed;
  g.refine = !o.noRefine;
  ojson& opt = run.options();
  opt["meshH"] = g.meshH;
  opt["cells"] = g.truncationN;
  opt["starts"] = g.starts;
  opt["seed"] = g.seed;
  opt["refine"] = g.refine;

  GNReport gn;
  try {
    gn = estimate_cg(s, g);
  } catch (const InconclusiveError& e) {
    run.results()["message"] = e.what();
    run.finish("Inconclusive");
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInconclusive;
  }
  ojson& r = run.results();
  r["cgEstimate"] = gn.cgEstimate;
  r["muGEstimate"] = gn.muGEstimate;
  r["muGOverMuR"] = gn.muGEstimate / mu_R;
  r["muGOverMuRPlus"] = gn.muGEstimate / mu_R_plus;
  r["meshSpacing"] = gn.meshSpacing;
  r["truncationN"] = gn.truncationN;
  r["bestStart"] = gn.bestStart;
  if (g.refine) {
    r["refined"] = {{"cg", gn.refinedCg}, {"muG", gn.refinedMuG}, {"h", gn.refinedH}, {"N", gn.refinedN}};
  }
  r["traces"] = ojson::array();
  for (const GNTrace& t : gn.traces) {
    r["traces"].push_back(
        {{"start", t.start}, {"value", t.value}, {"iterations", t.iterations}, {"converged", t.converged}});
  }
  if (o.dumpProfile) run.profile(gn.maximizer);
  std::printf("cg=%.10g muG=%.10g\n", gn.cgEstimate, gn.muGEstimate);
  run.finish("ok");
  return kExitOk;
}

EdgeIndex edge_by_id(const PeriodicSpec& s, const std::string& id) {
  const auto e = s.cell.find_edge(id);
  if (!e) throw InputError("no cell edge \"" + id + "\"");
  return *e;
}

int cmd_trial(const Options& o) {
  Run run("trial", o);
  ojson& opt = run.options();
  opt["kind"] = o.kind;
  ojson& r = run.results();
  GraphFunction u;
  double p = 6.0;

  if (o.kind == "signpost") {
    const PeriodicSpec s = run.load();
    SignpostParams sp;
    sp.gammaHalf = 0.5 * s.cell.edge(edge_by_id(s, "Gamma")).length;
    sp.betaHalf = 0.5 * s.cell.edge(edge_by_id(s, "B")).length;
    sp.delta = s.cell.edge(edge_by_id(s, "H")).length;
    const double h = o.meshH > 0.0 ? o.meshH : std::min(0.01, 0.25 / o.lambda) / 32.0;
    opt["lambda"] = o.lambda;
    opt["meshH"] = h;
    const SignpostTrial t = signpost_trial(sp, o.lambda, h, std::max(o.cells, 0));
    u = t.u;
    r["energyUpperBound"] = t.energyUpperBound;
    r["r"] = t.r;
    r["rAsymptotic"] = t.rAsymptotic;
    r["q"] = t.q;
    r["qClosedForm"] = t.qClosedForm;
    r["tailSum6"] = t.tailSum6;
    r["N"] = t.N;
  } else {
    const PeriodicSpec s = run.load();
    require_valid(s);
    if (o.kind == "subcritical") {
      p = o.p;
      const double h = o.meshH > 0.0 ? o.meshH : 0.05;
      opt["p"] = p;
      opt["mu"] = o.mu;
      opt["meshH"] = h;
      const SubcriticalTrial t = subcritical_trial(s, p, o.mu, h, std::max(o.cells, 0));
      u = t.u;
      r["mu1"] = t.mu1;
      r["decomposedEnergy"] = t.decomposedEnergy;
      r["ell"] = t.layout.ell;
      r["stubs"] = t.layout.m();
      r["N"] = t.N;
    } else if (o.kind == "vanishing") {
      const double h = o.meshH > 0.0 ? o.meshH : 0.05;
      const int N = std::max(o.cells, o.n + 1);
      opt["mu"] = o.mu;
      opt["n"] = o.n;
      opt["meshH"] = h;
      opt["cells"] = N;
      const MeshPtr mesh = make_mesh(std::make_shared<const TruncatedGraph>(build_truncation(s, N)), h);
      const VanishingTrial t = vanishing_sequence(mesh, s, o.mu, o.n);
      u = t.u;
      r["alpha"] = t.alpha;
    } else if (o.kind == "bump") {
      const double h = o.meshH > 0.0 ? o.meshH : 1.0 / (64.0 * o.lambda);
      const int N = o.cells > 0 ? o.cells : 1;
      const EdgeIndex orbit = o.edge.empty() ? EdgeIndex{0} : edge_by_id(s, o.edge);
      opt["mu"] = o.mu;
      opt["lambda"] = o.lambda;
      opt["meshH"] = h;
      opt["cells"] = N;
      opt["edge"] = s.cell.edge(orbit).id;
      const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, N));
      const ConcentratingBump b = concentrating_bump(make_mesh(t, h), t->edge_of(0, orbit), o.mu, o.lambda);
      u = b.u;
      r["baseEnergy"] = b.baseEnergy;
      r["kappa"] = b.kappa;
    } else {
      throw InputError("--kind must be subcritical, vanishing, bump or signpost");
    }
  }
  r["p"] = p;
  r["energy"] = energy(u, p);
  r["mass"] = l2_mass(u);
  r["kinetic"] = kinetic(u);
  r["sup"] = sup_norm(u);
  run.profile(u);
  std::printf("energy=%.12g mass=%.12g\n", energy(u, p), l2_mass(u));
  run.finish("ok");
  return kExitOk;
}

int cmd_normalize(const Options& o) {
  Run run("normalize", o);
  const PeriodicSpec raw = run.load();
  const NormalizationResult nr = normalize_pasting(raw);
  ojson& r = run.results();
  r["outcome"] = to_string(nr.outcome);
  r["cellMultiplier"] = nr.cellMultiplier;
  r["steps"] = nr.steps;
  std::printf("outcome=%s\n", to_string(nr.outcome));
  if (nr.outcome == NormalizationResult::Outcome::StarLike) {
    r["cycle"] = nr.cycle;
    run.finish("StarLike");
    return kExitInconclusive;
  }
  r["equalityCheck"] = ojson::array();
  for (int N = 1; N <= 3; ++N) {
    r["equalityCheck"].push_back({{"N", N}, {"equal", normalization_consistent(raw, nr, N)}});
  }
  const SpecCheck check = validate_spec(nr.spec);
  r["valid"] = check.accepted();
  r["problems"] = check.problems;
  run.write("normalized.json", serialize_spec(nr.spec));
  run.finish(check.accepted() ? "ok" : "invalid");
  if (!check.accepted()) throw ValidationError(check.problems);
  return kExitOk;
}

int cmd_soliton(const Options& o) {
  Run run("soliton", o);
  const double h = o.meshH > 0.0 ? o.meshH : 0.01;
  const std::vector<double> grid = o.muGrid.empty() ? std::vector<double>{o.mu} : parse_grid(o.muGrid);
  ojson& opt = run.options();
  opt["p"] = o.p;
  opt["meshH"] = h;
  ojson& r = run.results();

  std::ostringstream csv, prof;
  char buf[256];
  prof << "mu,x,value\n";
  const auto dump = [&](double mu, double L, const GraphFunction& f) {
    const double step = (2.0 * L) / double(f.values.size() - 1);
    for (Eigen::Index k = 0; k < f.values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mu, -L + step * double(k), f.values[k]);
      prof << buf;
    }
  };

  if (o.p == 6.0) {
    const CriticalSoliton phi(o.lambda);
    opt["lambda"] = o.lambda;
    const double L = o.halfWidth > 0.0 ? o.halfWidth : 15.0 * std::numbers::sqrt3 / o.lambda;
    const GraphFunction f = sample_on_line(-L, L, h, [&](double x) { return phi(x); });
    r["muR"] = mu_R;
    r["muRPlus"] = mu_R_plus;
    r["sampledMass"] = l2_mass(f);
    r["energy"] = energy(f, 6.0);
    csv << "lambda,mass,energy\n";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", o.lambda, l2_mass(f), energy(f, 6.0));
    csv << buf;
    dump(mu_R, L, f);
  } else {
    const SolitonParams sp = soliton_params(o.p);
    r["params"] = {{"p", sp.p}, {"alpha", sp.alpha}, {"beta", sp.beta}, {"A", sp.A}, {"a", sp.a}, {"lambda", sp.lambda}};
    csv << "mu,lambda,sup,mass,energy\n";
    r["profiles"] = ojson::array();
    for (double mu : grid) {
      if (!(mu > 0.0)) throw InputError("soliton: masses must be positive");
      const double L =
          o.halfWidth > 0.0 ? o.halfWidth : 15.0 * (o.p - 2.0) / (sp.a * std::pow(mu, sp.beta));
      const GraphFunction f = sample_on_line(-L, L, h, [&](double x) { return sp.phi(mu, x); });
      const double lam = sp.lambda * std::pow(mu, 2.0 * sp.beta);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", mu, lam, sp.phi(mu, 0.0), l2_mass(f),
                    energy(f, o.p));
      csv << buf;
      r["profiles"].push_back({{"mu", mu}, {"lambda", lam}, {"mass", l2_mass(f)}, {"energy", energy(f, o.p)}});
      dump(mu, L, f);
    }
  }
  run.write("results.csv", csv.str());
  run.write("profile.csv", prof.str());
  std::fputs(csv.str().c_str(), stdout);
  run.finish("ok");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the NLS energy on periodic metric graphs"};
  app.set_version_flag("--version", PERGRAPH_VERSION);
  app.require_subcommand(1);
  Options o;

  const auto spec_arg = [&](CLI::App* c) { c->add_option("spec", o.spec, "Graph spec file (JSON)")->required(); };
  const auto common = [&](CLI::App* c) {
    c->add_option("--p", o.p, "Nonlinearity exponent");
    c->add_option("--mu", o.mu, "Mass");
    c->add_option("--mesh-h", o.meshH, "Mesh spacing");
    c->add_option("--cells", o.cells, "Truncation half-width N (cells -N..N)");
    c->add_option("--starts", o.starts, "Random starts");
    c->add_option("--seed", o.seed, "Random seed");
    c->add_flag("--normalize", o.normalize, "Rewrite the pasting rule first");
    c->add_option("--out", o.out, "Output directory");
    c->add_flag("--dump-profile", o.dumpProfile, "Write profile.csv");
  };
  const auto descent = [&](CLI::App* c) {
    c->add_option("--grad-tol", o.gradTol, "Stationarity tolerance");
    c->add_option("--max-iters", o.maxIters, "Iteration budget per start");
    c->add_flag("--no-stability", o.noStability, "Skip the N+2 re-solve");
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "Topology class and critical mass estimate");
  spec_arg(classify_cmd);
  common(classify_cmd);
  classify_cmd->add_flag("--skip-estimate", o.skipEstimate, "Topology only");

  CLI::App* minimize_cmd = app.add_subcommand("minimize", "Mass-constrained energy minimization");
  spec_arg(minimize_cmd);
  common(minimize_cmd);
  descent(minimize_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Minimize over a grid of masses");
  spec_arg(sweep_cmd);
  common(sweep_cmd);
  descent(sweep_cmd);
  sweep_cmd->add_option("--mu-grid", o.muGrid, "a:b:steps")->required();

  CLI::App* gn_cmd = app.add_subcommand("gn-estimate", "Lower bound on the p = 6 Gagliardo-Nirenberg constant");
  spec_arg(gn_cmd);
  common(gn_cmd);
  gn_cmd->add_flag("--no-refine", o.noRefine, "Skip the refined re-run");

  CLI::App* trial_cmd = app.add_subcommand("trial", "Explicit competitor functions");
  spec_arg(trial_cmd);
  common(trial_cmd);
  trial_cmd->add_option("--kind", o.kind, "subcritical | vanishing | bump | signpost")
      ->required()
      ->check(CLI::IsMember({"subcritical", "vanishing", "bump", "signpost"}));
  trial_cmd->add_option("--n", o.n, "Plateau half-width (vanishing)");
  trial_cmd->add_option("--lambda", o.lambda, "Concentration parameter (bump, signpost)");
  trial_cmd->add_option("--edge", o.edge, "Cell edge carrying the bump");

  CLI::App* normalize_cmd = app.add_subcommand("normalize", "Rewrite a raw pasting rule");
  spec_arg(normalize_cmd);
  normalize_cmd->add_option("--out", o.out, "Output directory");

  CLI::App* soliton_cmd = app.add_subcommand("soliton", "Soliton parameters and sampled profiles");
  soliton_cmd->add_option("--p", o.p, "Nonlinearity exponent");
  soliton_cmd->add_option("--mu", o.mu, "Mass");
  soliton_cmd->add_option("--mu-grid", o.muGrid, "a:b:steps");
  soliton_cmd->add_option("--mesh-h", o.meshH, "Sampling spacing");
  soliton_cmd->add_option("--half-width", o.halfWidth, "Sample on [-L, L]");
  soliton_cmd->add_option("--lambda", o.lambda, "Width parameter for p = 6");
  soliton_cmd->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*classify_cmd) return cmd_classify(o);
    if (*minimize_cmd) return cmd_minimize(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*gn_cmd) return cmd_gn(o);
    if (*trial_cmd) return cmd_trial(o);
    if (*normalize_cmd) return cmd_normalize(o);
    if (*soliton_cmd) return cmd_soliton(o);
  } catch (const Run::StarLike&) {
    std::fprintf(stderr, "pasting rule is star-like: the graph has finite diameter\n");
    return kExitInconclusive;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid spec:\n");
    for (const auto& p : e.problems()) std::fprintf(stderr, "  %s\n", p.c_str());
    return kExitInput;
  } catch (const InputError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInput;
  } catch (const InconclusiveError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInconclusive;
  }
  return kExitUsage;
}
