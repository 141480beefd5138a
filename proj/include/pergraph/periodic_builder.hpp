#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pergraph/graph_core.hpp"

namespace pergraph {

/// \brief Periodicity cell K with donors D, receivers R and pasting rule sigma: D -> R.
///
/// Copy i of a donor d is glued to copy i+1 of sigma(d).
struct PeriodicSpec {
  std::string name;
  CompactGraph cell;
  std::vector<VertexIndex> donors;
  std::vector<VertexIndex> receivers;
  std::map<VertexIndex, VertexIndex> sigma;
};

/// Shortest path in K from a donor x to sigma(x).
struct WitnessPath {
  VertexIndex donor = 0;
  VertexIndex receiver = 0;
  std::vector<EdgeIndex> edges;
  double length = 0.0;
};

struct SpecCheck {
  std::vector<std::string> problems;
  std::optional<WitnessPath> witness;

  bool accepted() const noexcept { return problems.empty(); }
};

/// \brief Collects every structural violation of \p s; the witness is set on acceptance.
SpecCheck validate_spec(const PeriodicSpec& s);

/// \brief Throws ValidationError listing all problems unless \p s is accepted.
WitnessPath require_valid(const PeriodicSpec& s);

/// \brief Finite piece of the periodic graph made of consecutive cell copies.
struct TruncatedGraph {
  CompactGraph graph;
  int N = 0;
  int firstCell = 0;
  int lastCell = 0;
  std::size_t cellVertexCount = 0;
  std::size_t cellEdgeCount = 0;
  /// Lowest cell index among the copies merged into each vertex.
  std::vector<int> vertexCell;
  std::vector<int> edgeCell;
  /// Cell edge that each truncation edge is a copy of.
  std::vector<EdgeIndex> edgeOrbit;
  /// Indexed by (cell - firstCell) * cellVertexCount + cell vertex.
  std::vector<VertexIndex> mergeMap;
  std::vector<bool> boundary;

  VertexIndex merged(int cell, VertexIndex v) const;
  EdgeIndex edge_of(int cell, EdgeIndex orbit) const;
  int cell_count() const noexcept { return lastCell - firstCell + 1; }
};

/// \brief Copies -N..N of a validated spec; boundary = D of copy N and R of copy -N.
TruncatedGraph build_truncation(const PeriodicSpec& s, int N);

/// \brief Copies first..last as they sit inside the infinite graph.
///
/// Works for raw specs too: identifications forced through copies outside the
/// range (non-injective rules) are taken into account. No boundary flags.
TruncatedGraph glue_cells(const PeriodicSpec& s, int first, int last);

/// \brief Subgraph spanned by the copies lo..hi of a truncation.
CompactGraph cells_subgraph(const TruncatedGraph& t, int lo, int hi);

struct NormalizationResult {
  enum class Outcome { AlreadyNormal, Normalized, StarLike };

  Outcome outcome = Outcome::AlreadyNormal;
  PeriodicSpec spec;
  int cellMultiplier = 1;
  /// Labels of a sigma-cycle inside D and R (StarLike only).
  std::vector<std::string> cycle;
  std::vector<std::string> steps;
};

/// \brief Rewrites a raw rule into one with disjoint D, R and bijective sigma.
NormalizationResult normalize_pasting(const PeriodicSpec& raw);

const char* to_string(NormalizationResult::Outcome o) noexcept;

/// \brief Copies -N..N of the rewritten rule against the matching raw copies, up to relabeling.
bool normalization_consistent(const PeriodicSpec& raw, const NormalizationResult& r, int N);

}  // namespace pergraph
