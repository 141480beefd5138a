#include <algorithm>
#include <string>

#include "doctest.h"
#include "pergraph/corpus.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/periodic_builder.hpp"

using namespace pergraph;

namespace {

bool mentions(const SpecCheck& c, const std::string& needle) {
  return std::any_of(c.problems.begin(), c.problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("bundled specs validate") {
  for (const PeriodicSpec& s : {corpus::ladder(), corpus::circles_and_segments(), corpus::pendant(),
                                corpus::signpost(), corpus::two_pendant_circles(), corpus::single_loop_chain()}) {
    INFO(s.name);
    const SpecCheck c = validate_spec(s);
    CHECK(c.accepted());
    REQUIRE(c.witness.has_value());
    CHECK(c.witness->length > 0.0);
  }
}

TEST_CASE("witness is the shortest donor to receiver path") {
  const SpecCheck c = validate_spec(corpus::ladder());
  REQUIRE(c.witness);
  CHECK(c.witness->length == doctest::Approx(1.0));
  CHECK(c.witness->edges.size() == 1);
  const SpecCheck s = validate_spec(corpus::signpost(0.5, 0.5, 0.25));
  CHECK(s.witness->length == doctest::Approx(0.25));
}

TEST_CASE("rejections list every problem") {
  CHECK(mentions(validate_spec(corpus::starlike()), "D and R intersect"));
  CHECK(mentions(validate_spec(corpus::nonbijective()), "not injective"));
  CHECK(mentions(validate_spec(corpus::interval()), "degree >= 3"));

  PeriodicSpec s = corpus::ladder();
  s.sigma.erase(s.donors.front());
  const SpecCheck c = validate_spec(s);
  CHECK(mentions(c, "undefined on donor"));
  CHECK(mentions(c, "not surjective"));
  CHECK_THROWS_AS(require_valid(s), ValidationError);
}

TEST_CASE("truncation counts and boundary") {
  const PeriodicSpec s = corpus::ladder();
  for (int N : {0, 1, 3}) {
    const TruncatedGraph t = build_truncation(s, N);
    CHECK(t.cell_count() == 2 * N + 1);
    CHECK(t.graph.edge_count() == 3 * std::size_t(2 * N + 1));
    // Four cell vertices, two glued per interface.
    CHECK(t.graph.vertex_count() == 4 * std::size_t(2 * N + 1) - 2 * std::size_t(2 * N));
    CHECK(std::count(t.boundary.begin(), t.boundary.end(), true) == 4);
    CHECK(t.graph.total_length() == doctest::Approx(3.0 * (2 * N + 1)));
  }
  CHECK_THROWS_AS(build_truncation(s, -1), InputError);
}

TEST_CASE("gluing identifies donor copy i with receiver copy i+1") {
  const PeriodicSpec s = corpus::pendant();
  const TruncatedGraph t = build_truncation(s, 2);
  const VertexIndex b = *s.cell.find_vertex("b");
  const VertexIndex a = *s.cell.find_vertex("a");
  for (int i = -2; i < 2; ++i) CHECK(t.merged(i, b) == t.merged(i + 1, a));
  CHECK(t.merged(0, b) != t.merged(0, a));
  CHECK(t.graph.edge(t.edge_of(1, 0)).length == doctest::Approx(1.0));
  CHECK(t.edgeCell[t.edge_of(-2, 1)] == -2);
}

TEST_CASE("glue_cells follows identifications outside the range") {
  const PeriodicSpec raw = corpus::nonbijective();
  const TruncatedGraph one = glue_cells(raw, 0, 0);
  // s and t share an image, so they are one point of the infinite graph.
  CHECK(one.merged(0, *raw.cell.find_vertex("s")) == one.merged(0, *raw.cell.find_vertex("t")));
}

TEST_CASE("normalization outcomes") {
  const NormalizationResult star = normalize_pasting(corpus::starlike());
  CHECK(star.outcome == NormalizationResult::Outcome::StarLike);
  CHECK_FALSE(star.cycle.empty());

  const PeriodicSpec raw = corpus::nonbijective();
  const NormalizationResult nb = normalize_pasting(raw);
  CHECK(nb.outcome == NormalizationResult::Outcome::Normalized);
  CHECK(validate_spec(nb.spec).accepted());
  for (int N : {1, 2, 3}) CHECK(normalization_consistent(raw, nb, N));

  const NormalizationResult same = normalize_pasting(corpus::ladder());
  CHECK(same.outcome == NormalizationResult::Outcome::AlreadyNormal);
  CHECK(same.cellMultiplier == 1);
}

TEST_CASE("overlapping donors and receivers are resolved by glueing copies") {
  // x -> y -> z chain inside D and R, but no cycle.
  PeriodicSpec s;
  s.name = "chain";
  for (const char* l : {"x", "y", "z", "c"}) s.cell.add_vertex(l);
  s.cell.add_edge("cx", 3, 0, 1.0);
  s.cell.add_edge("cy", 3, 1, 1.0);
  s.cell.add_edge("cz", 3, 2, 1.0);
  s.donors = {0, 1};
  s.receivers = {1, 2};
  s.sigma = {{0, 1}, {1, 2}};
  const NormalizationResult r = normalize_pasting(s);
  CHECK(r.outcome == NormalizationResult::Outcome::Normalized);
  CHECK(r.cellMultiplier > 1);
  for (int N : {1, 2}) CHECK(normalization_consistent(s, r, N));
}
