#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pergraph/corpus.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/nls_minimizer.hpp"
#include "pergraph/solitons.hpp"
#include "pergraph/trial_constructions.hpp"

using namespace pergraph;

namespace {

bool non_increasing(const std::vector<HistoryEntry>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i].energy > h[i - 1].energy + 1e-14 * std::abs(h[i - 1].energy)) return false;
  }
  return true;
}

MinimizeOptions advised(const PeriodicSpec& s, double p, double mu) {
  const TruncationAdvice a = suggest_discretization(s, p, mu, 0.1);
  REQUIRE(a.interiorOptimum);
  MinimizeOptions o;
  o.p = p;
  o.mu = mu;
  o.truncationN = a.N;
  o.meshH = a.h;
  o.gradTol = 1e-9;
  return o;
}

}  // namespace

TEST_CASE("option validation") {
  MinimizeOptions o;
  CHECK_NOTHROW(o.validate());
  o.p = 7.0;
  CHECK_THROWS_AS(o.validate(), InputError);
  o = MinimizeOptions{};
  o.mu = -1.0;
  CHECK_THROWS_AS(o.validate(), InputError);
  o = MinimizeOptions{};
  o.truncationN = 0;
  CHECK_THROWS_AS(o.validate(), InputError);
}

TEST_CASE("advice widens the truncation as the mass decreases") {
  const PeriodicSpec s = corpus::ladder();
  const TruncationAdvice big = suggest_discretization(s, 4.0, 2.0);
  const TruncationAdvice small = suggest_discretization(s, 4.0, 0.5);
  CHECK(big.interiorOptimum);
  CHECK(small.interiorOptimum);
  CHECK(small.N > big.N);
  CHECK(small.width > big.width);
}

TEST_CASE("ladder, cubic: converged ground state below the subcritical competitor") {
  const PeriodicSpec s = corpus::ladder();
  const MinimizeOptions o = advised(s, 4.0, 2.0);
  const MinimizeReport r = minimize(s, o);
  CHECK(r.status == MinimizeStatus::Converged);
  CHECK(r.energy < 0.0);
  CHECK(r.mass == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.kirchhoffMax <= 10.0 * o.gradTol);
  CHECK(argmax_cell(r.u) == 0);
  CHECK(std::abs(r.stabilityEnergy - r.energy) < 1e-6);
  const SubcriticalTrial trial = subcritical_trial(s, 4.0, 2.0, r.h, r.N);
  CHECK(r.energy <= energy(trial.u, 4.0) + 1e-6);
  for (const DescentRun& run : r.runs) CHECK(non_increasing(run.history));
}

TEST_CASE("critical exponent above the line threshold is unbounded") {
  const PeriodicSpec s = corpus::ladder();
  MinimizeOptions o;
  o.p = 6.0;
  o.mu = 1.2 * mu_R;
  o.truncationN = 3;
  o.meshH = 0.05;
  o.checkStability = false;
  const MinimizeReport r = minimize(s, o);
  CHECK(r.status == MinimizeStatus::Unbounded);
  CHECK(std::isinf(r.groundStateEnergy));
}

TEST_CASE("single descent records a monotone history") {
  const PeriodicSpec s = corpus::circles_and_segments();
  MinimizeOptions o;
  o.p = 3.0;
  o.mu = 2.0;
  o.truncationN = 6;
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, o.truncationN));
  const MeshPtr m = make_mesh(t, o.meshH);
  const auto starts = initial_data(m, o);
  REQUIRE(starts.size() >= 3);
  const DescentRun run = descend(m, starts.front().second, o, starts.front().first);
  CHECK(run.iterations > 0);
  CHECK(non_increasing(run.history));
  CHECK(l2_mass(run.u) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("sweep grid checks and csv format") {
  const PeriodicSpec s = corpus::ladder();
  CHECK_THROWS_AS(sweep(s, 4.0, {1.0, 1.0}, MinimizeOptions{}), InputError);
  CHECK_THROWS_AS(sweep(s, 4.0, {-1.0}, MinimizeOptions{}), InputError);

  SweepRow row;
  row.mu = 0.5;
  row.status = MinimizeStatus::Vanishing;
  row.energy = -1e-5;
  row.iterations = 12;
  row.N = 8;
  row.h = 0.05;
  std::ostringstream os;
  write_sweep_csv({row}, os);
  CHECK(os.str() ==
        "mu,status,energy,kinetic,sup,lambda,iters,N,h\n"
        "0.5,Vanishing,-1.0000000000000001e-05,0,0,0,12,8,0.050000000000000003\n");
}

TEST_CASE("identical inputs give identical sweep tables") {
  const PeriodicSpec s = corpus::pendant();
  MinimizeOptions o;
  o.truncationN = 4;
  o.meshH = 0.1;
  o.checkStability = false;
  std::ostringstream a, b;
  write_sweep_csv(sweep(s, 4.0, {1.0, 2.0}, o), a);
  write_sweep_csv(sweep(s, 4.0, {1.0, 2.0}, o), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("a state pinned to a free end of the truncation is not vanishing") {
  const PeriodicSpec s = corpus::ladder();
  MinimizeOptions o;
  o.p = 5.0;
  o.mu = 1.0;
  o.meshH = 1.0;
  o.truncationN = 7311;
  o.gradTol = 1e-9;
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, o.truncationN));
  const MeshPtr m = make_mesh(t, o.meshH);
  for (const auto& [label, f] : initial_data(m, o)) {
    if (label != "constant") continue;
    const DescentRun run = descend(m, f, o, label);
    // Half-line copy of the bulk state: 64 times its energy, small enough to pass for vanishing.
    CHECK(std::abs(run.energy) < o.vanishingEnergyTol);
    CHECK(run.tailMass > o.tailMassTol);
    CHECK(run.status == MinimizeStatus::Inconclusive);
  }
}

TEST_CASE("critical exponent: grid-scale state above the line threshold is caught by refinement") {
  MinimizeOptions o;
  o.p = 6.0;
  o.mu = 1.05 * mu_R;
  o.truncationN = 2;
  o.meshH = 0.02;
  o.gradTol = 1e-8;
  o.checkStability = false;
  const MinimizeReport r = minimize(corpus::signpost(), o);
  CHECK(r.status == MinimizeStatus::Unbounded);
  CHECK(r.resolutionEnergy < 2.0 * r.energy);
}
