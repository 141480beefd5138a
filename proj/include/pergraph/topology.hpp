#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pergraph/graph_function.hpp"

namespace pergraph {

struct TopologyClass {
  enum class Kind { HPer, TerminalEdge, Neither };

  Kind kind = Kind::HPer;
  /// Cell edge incident to a degree-one vertex (TerminalEdge only).
  std::optional<EdgeIndex> terminalEdge;
  /// Cell edges whose removal detaches a compact piece (Neither only).
  std::vector<EdgeIndex> cutEdges;
};

const char* to_string(TopologyClass::Kind k) noexcept;

/// \brief A cell edge of the glued graph incident to a vertex of degree one, if any.
std::optional<EdgeIndex> has_terminal_edge(const PeriodicSpec& s);

struct HPerVerdict {
  bool satisfied = true;
  std::optional<EdgeIndex> edge;
  /// Labels of the compact component's vertices in the probing truncation.
  std::vector<std::string> component;
  /// Width W of the (2W+1)-cell truncation at which the answer stabilized.
  int width = 0;
};

/// \brief Checks that deleting any edge leaves only non-compact components.
///
/// A component is compact when it avoids every boundary vertex of a wide truncation;
/// widths start at 3 and double until two consecutive answers agree.
HPerVerdict satisfies_h_per(const PeriodicSpec& s, int maxWidth = 48);

/// \brief All cell edges whose deletion creates a compact component.
std::vector<EdgeIndex> cut_edge_set(const PeriodicSpec& s, int maxWidth = 48);

TopologyClass classify(const PeriodicSpec& s, int maxWidth = 48);

/// \brief Replaces every copy of the given cell edges by two parallel edges of twice the length.
///
/// The function is stretched onto both copies: u~(x) = u(x / 2). The new mesh keeps the node
/// count of the doubled edges, so the discrete norms obey the continuous identities exactly.
std::pair<std::shared_ptr<const TruncatedGraph>, GraphFunction> double_cut_edges(
    const GraphFunction& u, const std::set<EdgeIndex>& orbits);

}  // namespace pergraph
