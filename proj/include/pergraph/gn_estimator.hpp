#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pergraph/graph_function.hpp"

namespace pergraph {

/// \f$\|u\|_p^p / (\|u\|_2^{p/2+1} \|u'\|_2^{p/2-1})\f$.
double gn_quotient(const GraphFunction& u, double p);

/// \f$\sqrt{3 / c_G}\f$.
double critical_mass(double cg);

struct GNOptions {
  double meshH = 0.02;
  int truncationN = 6;
  /// Random smooth starts added to the soliton and edge-bump starts.
  int starts = 2;
  std::uint64_t seed = 7;
  int maxIters = 4000;
  /// Stop when the quotient changes by less than this (relative) over `window` iterations.
  double relTol = 1e-9;
  int window = 20;
  /// Repeat the best run at h/2 on the N+2 truncation.
  bool refine = true;
};

struct GNTrace {
  std::string start;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct GNReport {
  double cgEstimate = 0.0;
  GraphFunction maximizer;
  double muGEstimate = 0.0;
  double meshSpacing = 0.0;
  int truncationN = 0;
  int starts = 0;
  std::string bestStart;
  std::vector<GNTrace> traces;
  /// Same quantities on the refined discretization (zero when refine is off).
  double refinedCg = 0.0;
  double refinedMuG = 0.0;
  double refinedH = 0.0;
  int refinedN = 0;
};

/// \brief Ascent on log of the p = 6 quotient from one start, renormalized to unit mass.
///
/// Values at the truncation boundary are pinned to zero.
GNTrace gn_ascend(GraphFunction& u, const GNOptions& opts, const std::string& label = "given");

/// \brief Multistart lower bound on the optimal p = 6 Gagliardo-Nirenberg constant.
///
/// Throws InconclusiveError, listing every start, when no start meets the stopping rule.
GNReport estimate_cg(const PeriodicSpec& s, const GNOptions& opts);

}  // namespace pergraph
