#include "pergraph/corpus.hpp"

#include <algorithm>
#include <tuple>

namespace pergraph::corpus {

namespace {

PeriodicSpec make(const std::string& name, const std::vector<std::string>& vertices,
                  const std::vector<std::tuple<std::string, std::string, std::string, double>>& edges,
                  const std::vector<std::pair<std::string, std::string>>& sigma) {
  PeriodicSpec s;
  s.name = name;
  for (const auto& v : vertices) s.cell.add_vertex(v);
  for (const auto& [id, a, b, len] : edges) {
    s.cell.add_edge(id, *s.cell.find_vertex(a), *s.cell.find_vertex(b), len);
  }
  for (const auto& [d, r] : sigma) {
    const VertexIndex dv = *s.cell.find_vertex(d);
    const VertexIndex rv = *s.cell.find_vertex(r);
    if (s.sigma.count(dv) == 0) s.donors.push_back(dv);
    if (std::find(s.receivers.begin(), s.receivers.end(), rv) == s.receivers.end()) {
      s.receivers.push_back(rv);
    }
    s.sigma[dv] = rv;
  }
  return s;
}

}  // namespace

PeriodicSpec ladder() {
  return make("ladder", {"a", "b", "a'", "b'"},
              {{"rung", "a", "b", 1.0}, {"top", "a", "a'", 1.0}, {"bottom", "b", "b'", 1.0}},
              {{"a'", "a"}, {"b'", "b"}});
}

PeriodicSpec circles_and_segments() {
  return make("circles-and-segments", {"a", "b", "c"},
              {{"upper", "a", "b", 1.0}, {"lower", "a", "b", 1.0}, {"segment", "b", "c", 1.0}},
              {{"c", "a"}});
}

PeriodicSpec pendant() {
  return make("pendant", {"a", "b", "p"}, {{"spine", "a", "b", 1.0}, {"dangling", "b", "p", 1.0}},
              {{"b", "a"}});
}

PeriodicSpec signpost(double gamma, double beta, double delta) {
  return make("signpost", {"c", "s", "h"},
              {{"Gamma", "c", "c", 2.0 * gamma}, {"B", "c", "s", 2.0 * beta}, {"H", "s", "h", delta}},
              {{"h", "s"}});
}

PeriodicSpec starlike() {
  return make("starlike", {"x", "a", "b"}, {{"xa", "x", "a", 1.0}, {"xb", "x", "b", 1.0}},
              {{"x", "x"}});
}

PeriodicSpec nonbijective() {
  return make("nonbijective", {"r", "c", "s", "t"},
              {{"rc", "r", "c", 1.0}, {"cs", "c", "s", 1.0}, {"ct", "c", "t", 1.5}},
              {{"s", "r"}, {"t", "r"}});
}

PeriodicSpec interval() {
  return make("interval", {"0", "1"}, {{"e", "0", "1", 1.0}}, {{"1", "0"}});
}

PeriodicSpec two_pendant_circles() {
  return make("two-pendant-circles", {"s", "c1", "c2", "h"},
              {{"B1", "s", "c1", 1.0},
               {"loop1", "c1", "c1", 1.0},
               {"B2", "c1", "c2", 1.0},
               {"loop2", "c2", "c2", 1.0},
               {"H", "s", "h", 1.0}},
              {{"h", "s"}});
}

PeriodicSpec single_loop_chain() {
  return make("single-loop-chain", {"v", "w"}, {{"loop", "v", "v", 1.0}, {"connector", "v", "w", 1.0}},
              {{"w", "v"}});
}

}  // namespace pergraph::corpus
