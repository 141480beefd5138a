#include <cmath>
#include <set>

#include "doctest.h"
#include "pergraph/corpus.hpp"
#include "pergraph/solitons.hpp"
#include "pergraph/topology.hpp"

using namespace pergraph;

namespace {

std::set<std::string> ids(const PeriodicSpec& s, const std::vector<EdgeIndex>& es) {
  std::set<std::string> out;
  for (EdgeIndex e : es) out.insert(s.cell.edge(e).id);
  return out;
}

}  // namespace

TEST_CASE("classification of the bundled graphs") {
  const TopologyClass ladder = classify(corpus::ladder());
  CHECK(ladder.kind == TopologyClass::Kind::HPer);
  CHECK(classify(corpus::circles_and_segments()).kind == TopologyClass::Kind::HPer);
  CHECK(classify(corpus::single_loop_chain()).kind == TopologyClass::Kind::HPer);

  const PeriodicSpec pendant = corpus::pendant();
  const TopologyClass tp = classify(pendant);
  CHECK(tp.kind == TopologyClass::Kind::TerminalEdge);
  REQUIRE(tp.terminalEdge);
  CHECK(pendant.cell.edge(*tp.terminalEdge).id == "dangling");

  const PeriodicSpec sign = corpus::signpost();
  const TopologyClass ts = classify(sign);
  CHECK(ts.kind == TopologyClass::Kind::Neither);
  CHECK(ids(sign, ts.cutEdges) == std::set<std::string>{"B"});

  const PeriodicSpec two = corpus::two_pendant_circles();
  CHECK(ids(two, cut_edge_set(two)) == std::set<std::string>{"B1", "B2"});
}

TEST_CASE("H_per verdict names the offending edge") {
  const HPerVerdict ok = satisfies_h_per(corpus::ladder());
  CHECK(ok.satisfied);
  const PeriodicSpec sign = corpus::signpost();
  const HPerVerdict bad = satisfies_h_per(sign);
  CHECK_FALSE(bad.satisfied);
  REQUIRE(bad.edge);
  CHECK(sign.cell.edge(*bad.edge).id == "B");
  CHECK_FALSE(bad.component.empty());
  CHECK_FALSE(has_terminal_edge(sign).has_value());
}

TEST_CASE("doubling cut edges: kinetic unchanged, L^q picks up three extra copies") {
  const PeriodicSpec s = corpus::signpost();
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 2));
  const MeshPtr mesh = make_mesh(t, 0.01);
  const EdgeIndex bridge = *s.cell.find_edge("B");
  std::vector<bool> cut(t->graph.edge_count());
  for (EdgeIndex e = 0; e < cut.size(); ++e) cut[e] = t->edgeOrbit[e] == bridge;

  for (double lambda : {1.0, 3.0}) {
    const CriticalSoliton phi(lambda);
    const GraphFunction d = distance_from(mesh, t->merged(0, *s.cell.find_vertex("c")));
    GraphFunction u{mesh, d.values.unaryExpr([&](double x) { return phi(x); })};
    const auto [t2, v] = double_cut_edges(u, {bridge});
    CHECK(t2->graph.edge_count() == t->graph.edge_count() + 5);
    CHECK(kinetic(v) == doctest::Approx(kinetic(u)).epsilon(1e-8));
    for (double q : {2.0, 6.0}) {
      const double expected = lp_power(u, q) + 3.0 * lp_power(u, q, cut);
      CHECK(lp_power(v, q) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}
