#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "pergraph/periodic_builder.hpp"

namespace pergraph {

/// \brief Uniform P1 mesh on every edge of a truncation.
///
/// Node layout: one shared slot per graph vertex (indices 0..|V|-1), followed by
/// the interior nodes of each edge stored contiguously.
class Mesh {
 public:
  /// n_e = ceil(l_e / h) + 1 nodes on edge e.
  Mesh(std::shared_ptr<const TruncatedGraph> owner, double h);
  Mesh(std::shared_ptr<const TruncatedGraph> owner, std::vector<std::size_t> nodesPerEdge);

  const TruncatedGraph& owner() const noexcept { return *owner_; }
  const std::shared_ptr<const TruncatedGraph>& owner_ptr() const noexcept { return owner_; }
  const CompactGraph& graph() const noexcept { return owner_->graph; }

  double target_spacing() const noexcept { return h_; }
  double finest_spacing() const noexcept;
  std::size_t node_count() const noexcept { return nodeCount_; }
  std::size_t nodes_on_edge(EdgeIndex e) const { return perEdge_.at(e); }
  double spacing(EdgeIndex e) const { return graph().edge(e).length / double(perEdge_[e] - 1); }

  /// Global index of node j (0 = start vertex, n_e - 1 = end vertex) on edge e.
  std::size_t node(EdgeIndex e, std::size_t j) const noexcept {
    const std::size_t last = perEdge_[e] - 1;
    if (j == 0) return graph().edge(e).v;
    if (j == last) return graph().edge(e).w;
    return offset_[e] + j - 1;
  }

  /// Nested refinement: every interval split in two.
  Mesh refined() const;

 private:
  void layout();

  std::shared_ptr<const TruncatedGraph> owner_;
  double h_ = 0.0;
  std::vector<std::size_t> perEdge_;
  std::vector<std::size_t> offset_;
  std::size_t nodeCount_ = 0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr make_mesh(const TruncatedGraph& t, double h);
MeshPtr make_mesh(std::shared_ptr<const TruncatedGraph> t, double h);

/// \brief Continuous piecewise-linear function on a mesh.
struct GraphFunction {
  MeshPtr mesh;
  Eigen::VectorXd values;
};

GraphFunction zero_function(MeshPtr mesh);

/// \brief Nodal interpolation of f(edge, x), x measured from the edge start.
///
/// Throws InputError when two edges disagree at a shared vertex by more than tol.
GraphFunction sample(MeshPtr mesh, const std::function<double(EdgeIndex, double)>& f,
                     double tol = 1e-9);

double value_at(const GraphFunction& u, const GraphPoint& x);

/// \f$\int |u|^p\f$ by Simpson's rule on each mesh interval.
double lp_power(const GraphFunction& u, double p);
/// Same integral restricted to the edges flagged in \p edges.
double lp_power(const GraphFunction& u, double p, const std::vector<bool>& edges);
double lp_norm(const GraphFunction& u, double p);
double l2_mass(const GraphFunction& u);
double kinetic(const GraphFunction& u);
double kinetic(const GraphFunction& u, const std::vector<bool>& edges);
double sup_norm(const GraphFunction& u);

/// \f$\frac12\|u'\|^2 - \frac1p\|u\|_p^p\f$, p in (2, 6].
double energy(const GraphFunction& u, double p);

GraphFunction rescale_to_mass(const GraphFunction& u, double mu);

struct ElResidual {
  double lambda = 0.0;
  double interiorResidual = 0.0;
  double kirchhoffMax = 0.0;
};

ElResidual el_residual(const GraphFunction& u, double p);

/// \brief Moves the content of cell i to cell i + k; vacated cells become zero.
GraphFunction cell_shift(const GraphFunction& u, int k);

/// \brief Interpolates u onto another mesh of a truncation of the same cell.
///
/// Cells of the target that the source does not cover are set to zero.
GraphFunction transfer(const GraphFunction& u, MeshPtr target);

/// \brief Shortest-path distance from a graph vertex, evaluated at every node.
GraphFunction distance_from(MeshPtr mesh, VertexIndex source);

/// L2 mass carried by the edges of each cell of the owning truncation (index cell - firstCell).
std::vector<double> cell_masses(const GraphFunction& u);

/// \brief Cell holding the largest nodal value of |u|.
int argmax_cell(const GraphFunction& u);

/// \brief Path graph with consecutive edges of the given lengths, as a one-cell truncation.
std::shared_ptr<const TruncatedGraph> path_graph(const std::vector<double>& lengths);

/// \brief f sampled on a single-edge line [a, b] with spacing at most h.
GraphFunction sample_on_line(double a, double b, double h, const std::function<double(double)>& f);

/// CSV with header edge_id,cell,x,value; one row per node and edge.
void write_profile_csv(const GraphFunction& u, std::ostream& out);

namespace fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Stiffness matrix, u^T S u = kinetic(u).
SparseMatrix stiffness(const Mesh& mesh);
/// Consistent P1 mass matrix, u^T M u = l2_mass(u).
SparseMatrix mass(const Mesh& mesh);
/// Gradient of lp_power(u, p) with respect to the nodal values.
Eigen::VectorXd lp_power_gradient(const GraphFunction& u, double p);

}  // namespace fem

}  // namespace pergraph
