#include "pergraph/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pergraph/errors.hpp"

namespace pergraph {

DistributionFunction::DistributionFunction(const GraphFunction& u) {
  const Mesh& m = *u.mesh;
  const CompactGraph& g = m.graph();
  struct Piece {
    double lo, hi, h;
  };
  std::vector<Piece> pieces;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const double h = m.spacing(e);
    for (std::size_t j = 0; j + 1 < m.nodes_on_edge(e); ++j) {
      const double a = std::abs(u.values[static_cast<Eigen::Index>(m.node(e, j))]);
      const double b = std::abs(u.values[static_cast<Eigen::Index>(m.node(e, j + 1))]);
      pieces.push_back({std::min(a, b), std::max(a, b), h});
      levels_.push_back(a);
      levels_.push_back(b);
      total_ += h;
    }
  }
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
  const std::size_t k = levels_.size();
  // Difference arrays over breakpoint index: constant parts and the linear part C + S t.
  std::vector<double> constRight(k + 1, 0.0), constLeft(k + 1, 0.0), c(k + 1, 0.0), s(k + 1, 0.0);
  const auto index = [this](double v) {
    return static_cast<std::size_t>(std::lower_bound(levels_.begin(), levels_.end(), v) - levels_.begin());
  };
  for (const Piece& p : pieces) {
    const std::size_t ia = index(p.lo);
    if (p.hi == p.lo) {
      constRight[0] += p.h;
      constRight[ia] -= p.h;
      constLeft[0] += p.h;
      constLeft[ia + 1] -= p.h;
      continue;
    }
    const std::size_t ib = index(p.hi);
    constRight[0] += p.h;
    constRight[ia + 1] -= p.h;
    constLeft[0] += p.h;
    constLeft[ia + 1] -= p.h;
    const double slope = p.h / (p.hi - p.lo);
    c[ia + 1] += slope * p.hi;
    c[ib] -= slope * p.hi;
    s[ia + 1] -= slope;
    s[ib] += slope;
  }
  right_.resize(k);
  left_.resize(k);
  double cr = 0.0, cl = 0.0, cc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    cr += constRight[i];
    cl += constLeft[i];
    cc += c[i];
    ss += s[i];
    const double linear = cc + ss * levels_[i];
    right_[i] = std::max(0.0, cr + linear);
    left_[i] = std::max(0.0, cl + linear);
  }
  if (k > 0) right_[k - 1] = 0.0;
}

double DistributionFunction::measure_above(double t) const {
  if (levels_.empty() || t < levels_.front()) return total_;
  if (t >= levels_.back()) return 0.0;
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(levels_.begin(), levels_.end(), t) - levels_.begin()) - 1;
  if (t == levels_[i]) return right_[i];
  const double w = (t - levels_[i]) / (levels_[i + 1] - levels_[i]);
  return (1.0 - w) * right_[i] + w * left_[i + 1];
}

double DistributionFunction::decreasing(double s) const {
  if (levels_.empty()) return 0.0;
  if (s >= total_) return levels_.front();
  // right_ is non-increasing; first index whose measure is <= s.
  const auto it = std::lower_bound(right_.begin(), right_.end(), s, std::greater<>{});
  const std::size_t k = static_cast<std::size_t>(it - right_.begin());
  if (k == 0) return levels_.front();
  if (left_[k] > s) return levels_[k];
  const double span = right_[k - 1] - left_[k];
  if (span <= 0.0) return levels_[k];
  const double w = (right_[k - 1] - s) / span;
  return levels_[k - 1] + w * (levels_[k] - levels_[k - 1]);
}

std::vector<double> DistributionFunction::knots() const {
  std::vector<double> out{0.0, total_};
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    out.push_back(right_[i]);
    out.push_back(left_[i]);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  const double eps = 1e-12 * std::max(1.0, total_);
  for (double s : out) {
    if (s < 0.0 || s > total_) continue;
    if (merged.empty() || s - merged.back() > eps) merged.push_back(s);
  }
  merged.back() = total_;
  return merged;
}

double LineFunction::operator()(double x) const {
  if (x <= 0.0) return u.values[0];
  const std::size_t last = positions.size() - 1;
  if (x >= positions.back()) return u.values[static_cast<Eigen::Index>(last)];
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(positions.begin(), positions.end(), x) - positions.begin()) - 1;
  return value_at(u, GraphPoint{i, std::min(x - positions[i], u.mesh->graph().edge(i).length)});
}

namespace {

LineFunction build_line(const std::vector<double>& positions, double h,
                        const std::function<double(double)>& f) {
  std::vector<double> lengths;
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) lengths.push_back(positions[i + 1] - positions[i]);
  LineFunction out;
  out.positions = positions;
  out.u = sample(make_mesh(path_graph(lengths), h),
                 [&](EdgeIndex e, double x) { return f(positions[e] + x); },
                 std::numeric_limits<double>::infinity());
  // Vertex slots are taken directly at the knots to avoid round-off in positions[e] + length.
  for (std::size_t i = 0; i < positions.size(); ++i) out.u.values[static_cast<Eigen::Index>(i)] = f(positions[i]);
  return out;
}

}  // namespace

LineFunction decreasing_rearrangement_to_halfline(const GraphFunction& u) {
  const DistributionFunction dist(u);
  if (dist.total_measure() <= 0.0) throw InputError("rearrangement of a graph with no length");
  return build_line(dist.knots(), u.mesh->finest_spacing(),
                    [&dist](double s) { return dist.decreasing(s); });
}

LineFunction symmetric_rearrangement_to_line(const GraphFunction& u) {
  const DistributionFunction dist(u);
  const double total = dist.total_measure();
  if (total <= 0.0) throw InputError("rearrangement of a graph with no length");
  const std::vector<double> knots = dist.knots();
  std::vector<double> positions;
  for (auto it = knots.rbegin(); it != knots.rend(); ++it) positions.push_back(0.5 * (total - *it));
  for (std::size_t i = 1; i < knots.size(); ++i) positions.push_back(0.5 * (total + knots[i]));
  return build_line(positions, u.mesh->finest_spacing(),
                    [&dist, total](double x) { return dist.decreasing(std::abs(2.0 * x - total)); });
}

}  // namespace pergraph
