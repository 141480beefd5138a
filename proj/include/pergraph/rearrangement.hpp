#pragma once

#include <vector>

#include "pergraph/graph_function.hpp"

namespace pergraph {

/// \brief Distribution function t -> |{|u| > t}| of the piecewise-linear |u|.
///
/// Exact for the interpolant of the nodal values of |u|: m is piecewise linear in t
/// with breakpoints at the nodal values and jumps where |u| is flat.
class DistributionFunction {
 public:
  explicit DistributionFunction(const GraphFunction& u);

  double total_measure() const noexcept { return total_; }
  double measure_above(double t) const;
  /// Decreasing rearrangement u*(s) = inf{t : m(t) <= s}.
  double decreasing(double s) const;
  /// Every s in [0, total] at which u* changes slope or value.
  std::vector<double> knots() const;

 private:
  std::vector<double> levels_;
  std::vector<double> right_;  // m(t_k)
  std::vector<double> left_;   // lim m(t) as t increases to t_k
  double total_ = 0.0;
};

/// \brief Rearranged profile on a segment, stored on a path whose vertices sit at its knots.
struct LineFunction {
  GraphFunction u;
  /// Coordinates of the path vertices, starting at 0.
  std::vector<double> positions;

  double length() const noexcept { return positions.back(); }
  double operator()(double x) const;
};

/// Symmetric decreasing rearrangement on [-L/2, L/2], stored with coordinate x + L/2.
LineFunction symmetric_rearrangement_to_line(const GraphFunction& u);
/// Decreasing rearrangement on [0, L].
LineFunction decreasing_rearrangement_to_halfline(const GraphFunction& u);

}  // namespace pergraph
