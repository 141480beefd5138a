#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "pergraph/corpus.hpp"
#include "pergraph/errors.hpp"
#include "pergraph/graph_function.hpp"
#include "pergraph/solitons.hpp"

using namespace pergraph;

namespace {

MeshPtr ladder_mesh(int N, double h) {
  return make_mesh(std::make_shared<const TruncatedGraph>(build_truncation(corpus::ladder(), N)), h);
}

}  // namespace

TEST_CASE("mesh layout") {
  const MeshPtr m = ladder_mesh(1, 0.3);
  // ceil(1 / 0.3) + 1 = 5 nodes per unit edge.
  CHECK(m->nodes_on_edge(0) == 5);
  CHECK(m->spacing(0) == doctest::Approx(0.25));
  CHECK(m->node_count() == m->graph().vertex_count() + 9 * 3);
  const Mesh r = m->refined();
  CHECK(r.nodes_on_edge(0) == 9);
}

TEST_CASE("norms of a linear function are exact") {
  const auto line = path_graph({2.0});
  const MeshPtr m = make_mesh(line, 0.1);
  const GraphFunction u = sample(m, [](EdgeIndex, double x) { return 3.0 * x; });
  CHECK(l2_mass(u) == doctest::Approx(9.0 * 8.0 / 3.0));
  CHECK(kinetic(u) == doctest::Approx(18.0));
  CHECK(sup_norm(u) == doctest::Approx(6.0));
  CHECK(energy(u, 4.0) == doctest::Approx(9.0 - 0.25 * lp_power(u, 4.0)));
  // Simpson on each interval of a quartic: error of order h^4.
  CHECK(lp_power(u, 4.0) == doctest::Approx(81.0 * 32.0 / 5.0).epsilon(1e-4));

  const fem::SparseMatrix S = fem::stiffness(*m);
  CHECK(u.values.dot(S * u.values) == doctest::Approx(kinetic(u)));
}

TEST_CASE("sampled soliton mass against the closed form") {
  const SolitonParams sp = soliton_params(4.0);
  const GraphFunction u = sample_on_line(-80.0, 80.0, 0.01, [&](double x) { return sp.phi(1.0, x); });
  // phi_1 = (sqrt2 / 4) sech(x / 4) for p = 4, mass = (1/8) * 8 = 1.
  CHECK(l2_mass(u) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sample rejects values that disagree at a vertex") {
  const MeshPtr m = ladder_mesh(0, 0.25);
  CHECK_THROWS_AS(sample(m, [](EdgeIndex e, double) { return double(e); }), InputError);
}

TEST_CASE("rescale_to_mass") {
  const MeshPtr m = ladder_mesh(1, 0.1);
  const GraphFunction u = sample(m, [](EdgeIndex, double x) { return 1.0 + x * (1.0 - x); });
  CHECK(l2_mass(rescale_to_mass(u, 2.5)) == doctest::Approx(2.5));
  CHECK_THROWS(rescale_to_mass(zero_function(m), 1.0));
}

TEST_CASE("distances on the ladder") {
  const PeriodicSpec s = corpus::ladder();
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 2));
  const MeshPtr m = make_mesh(t, 0.5);
  const VertexIndex a0 = t->merged(0, *s.cell.find_vertex("a"));
  const GraphFunction d = distance_from(m, a0);
  CHECK(d.values[Eigen::Index(t->merged(0, *s.cell.find_vertex("b")))] == doctest::Approx(1.0));
  CHECK(d.values[Eigen::Index(t->merged(2, *s.cell.find_vertex("a")))] == doctest::Approx(2.0));
  CHECK(d.values[Eigen::Index(t->merged(-1, *s.cell.find_vertex("b")))] == doctest::Approx(2.0));
  CHECK(d.values.maxCoeff() == doctest::Approx(4.0));
}

TEST_CASE("cell masses and shifts") {
  const PeriodicSpec s = corpus::ladder();
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 3));
  const MeshPtr m = make_mesh(t, 0.1);
  const EdgeIndex rung0 = t->edge_of(0, *s.cell.find_edge("rung"));
  const GraphFunction bump = sample(m, [&](EdgeIndex e, double x) { return e == rung0 ? 4.0 * x * (1.0 - x) : 0.0; });
  const GraphFunction d = distance_from(m, t->merged(0, 0));
  const GraphFunction u{m, d.values.unaryExpr([](double x) { return std::exp(-2.0 * x); }) + bump.values};
  const std::vector<double> cm = cell_masses(u);
  CHECK(std::accumulate(cm.begin(), cm.end(), 0.0) == doctest::Approx(l2_mass(u)));
  CHECK(argmax_cell(u) == 0);
  const GraphFunction v = cell_shift(u, 1);
  CHECK(argmax_cell(v) == 1);
  const std::vector<double> cv = cell_masses(v);
  CHECK(cv[4] == doctest::Approx(cm[3]).epsilon(1e-6));
  const GraphFunction w = cell_shift(v, -1);
  CHECK(l2_mass(w) == doctest::Approx(l2_mass(u)).epsilon(1e-3));
}

TEST_CASE("transfer onto a finer mesh and a wider truncation") {
  const PeriodicSpec s = corpus::circles_and_segments();
  const auto t = std::make_shared<const TruncatedGraph>(build_truncation(s, 2));
  const MeshPtr coarse = make_mesh(t, 0.05);
  const GraphFunction d = distance_from(coarse, t->merged(0, 0));
  const GraphFunction u{coarse, d.values.unaryExpr([](double x) { return std::exp(-x); })};
  const MeshPtr fine = make_mesh(std::make_shared<const TruncatedGraph>(build_truncation(s, 4)), 0.025);
  const GraphFunction v = transfer(u, fine);
  CHECK(l2_mass(v) == doctest::Approx(l2_mass(u)).epsilon(1e-3));
  CHECK(sup_norm(v) == doctest::Approx(sup_norm(u)));
  CHECK(cell_masses(v).front() == 0.0);
}

TEST_CASE("Euler-Lagrange residual of the line soliton shrinks with h") {
  const SolitonParams sp = soliton_params(4.0);
  double prev = 0.0;
  for (double h : {0.04, 0.02}) {
    const GraphFunction u = sample_on_line(-60.0, 60.0, h, [&](double x) { return sp.phi(1.0, x); });
    const ElResidual r = el_residual(u, 4.0);
    CHECK(r.lambda == doctest::Approx(sp.lambda).epsilon(1e-3));
    if (prev > 0.0) CHECK(r.interiorResidual < 0.3 * prev);
    prev = r.interiorResidual;
  }
}

TEST_CASE("profile csv") {
  const MeshPtr m = make_mesh(path_graph({1.0}), 0.5);
  const GraphFunction u = sample(m, [](EdgeIndex, double x) { return x; });
  std::ostringstream os;
  write_profile_csv(u, os);
  CHECK(os.str() == "edge_id,cell,x,value\ns0,0,0,0\ns0,0,0.5,0.5\ns0,0,1,1\n");
}
