#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "pergraph/graph_function.hpp"

namespace pergraph {

struct MinimizeOptions {
  double p = 4.0;
  double mu = 1.0;
  double meshH = 0.05;
  int truncationN = 8;
  int maxIters = 20000;
  double gradTol = 1e-7;
  double energyFloor = -1e3;
  double kineticCap = 1e6;
  /// Seeded random starts, in addition to the soliton-centered and constant starts.
  int starts = 1;
  std::uint64_t seed = 1;
  int recenterEvery = 25;
  /// |E| below this on a delocalized stationary state counts as vanishing.
  double vanishingEnergyTol = 1e-4;
  /// Fraction of mass allowed in the two outermost cells on each side of a localized state.
  double tailMassTol = 1e-6;
  /// Re-solve on the N+2 truncation to certify the verdict.
  bool checkStability = true;
  /// For p = 6, re-solve a converged state at h/2; a large energy drop means concentration below the grid.
  bool checkResolution = true;

  void validate() const;
};

enum class MinimizeStatus { Converged, Vanishing, Unbounded, Inconclusive };

const char* to_string(MinimizeStatus s) noexcept;

struct HistoryEntry {
  double energy = 0.0;
  double kinetic = 0.0;
  double sup = 0.0;
  int argmaxCell = 0;
};

/// \brief Outcome of one descent from one initial datum.
struct DescentRun {
  MinimizeStatus status = MinimizeStatus::Inconclusive;
  std::string start;
  GraphFunction u;
  double energy = 0.0;
  double kinetic = 0.0;
  double gradNorm = 0.0;
  double tailMass = 0.0;
  int iterations = 0;
  std::vector<HistoryEntry> history;
};

struct MinimizeReport {
  MinimizeStatus status = MinimizeStatus::Inconclusive;
  /// Final state of the selected run, re-centered so that its sup lies in cell 0.
  GraphFunction u;
  double energy = 0.0;
  double kinetic = 0.0;
  double sup = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
  double interiorResidual = 0.0;
  double kirchhoffMax = 0.0;
  double gradNorm = 0.0;
  double tailMass = 0.0;
  int iterations = 0;
  int N = 0;
  double h = 0.0;
  std::string start;
  /// -infinity when unbounded.
  double groundStateEnergy = 0.0;
  /// Energy after re-solving on the N+2 truncation (NaN when not checked).
  double stabilityEnergy = std::numeric_limits<double>::quiet_NaN();
  /// Energy after re-solving at h/2 (p = 6 only).
  double resolutionEnergy = std::numeric_limits<double>::quiet_NaN();
  std::vector<HistoryEntry> history;
  std::vector<DescentRun> runs;
  std::string note;
};

/// \brief Width s minimizing the energy of the mass-mu profile sech^{2/(p-2)}(d(x, center) / s).
///
/// Scanned over s = 2^{j/2} between twice the mesh spacing and the truncation diameter.
double best_profile_width(MeshPtr mesh, VertexIndex center, double p, double mu);

struct TruncationAdvice {
  int N = 0;
  double h = 0.0;
  double width = 0.0;
  /// False when the profile energy keeps decreasing up to the largest width tried.
  bool interiorOptimum = false;
};

/// \brief Chooses N and h from the best sech-profile width on the infinite graph.
///
/// Each width is evaluated on its own truncation, wide enough that the dropped tail is
/// below e^{-16} of the mass; N is that width for the optimum, h is min(hMax, width / 16).
TruncationAdvice suggest_discretization(const PeriodicSpec& s, double p, double mu, double hMax = 0.1,
                                        int NMax = 20000);

/// \brief Initial data used by minimize, in order: a best-width sech profile centered at each
/// cell-0 vertex and at each cell-0 edge midpoint, a perturbed constant, then the seeded random fields.
std::vector<std::pair<std::string, GraphFunction>> initial_data(MeshPtr mesh, const MinimizeOptions& opts);

/// \brief Preconditioned projected descent from a single initial datum.
DescentRun descend(MeshPtr mesh, const GraphFunction& init, const MinimizeOptions& opts,
                   const std::string& label = "given");

/// \brief Multistart mass-constrained minimization on the N-truncation.
///
/// Throws InconclusiveError when no run reaches a verdict.
MinimizeReport minimize(const PeriodicSpec& s, const MinimizeOptions& opts);

struct SweepRow {
  double mu = 0.0;
  MinimizeStatus status = MinimizeStatus::Inconclusive;
  double energy = 0.0;
  double kinetic = 0.0;
  double sup = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  int N = 0;
  double h = 0.0;
  /// Cell holding the sup after re-centering.
  int supCell = 0;
  std::string note;
};

/// \brief One minimize per grid value; inconclusive rows are recorded, not thrown.
std::vector<SweepRow> sweep(const PeriodicSpec& s, double p, const std::vector<double>& muGrid,
                            const MinimizeOptions& opts);

/// Columns mu,status,energy,kinetic,sup,lambda,iters,N,h; doubles printed with %.17g.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace pergraph
