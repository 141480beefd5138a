#pragma once

#include <vector>

#include "pergraph/graph_function.hpp"
#include "pergraph/solitons.hpp"

namespace pergraph {

/// \brief Cell decomposition used by the subcritical competitor.
struct SubcriticalLayout {
  /// Cell edges with exactly one endpoint in D.
  std::vector<EdgeIndex> lEdges;
  double ell = 0.0;
  /// Measure of the cell once the length-ell stubs at the donors are removed.
  double gamma = 0.0;
  /// Edges away from the stubs whose endpoints are all donors.
  std::vector<EdgeIndex> ddEdges;
  std::size_t m() const noexcept { return lEdges.size(); }
};

SubcriticalLayout subcritical_layout(const PeriodicSpec& s);

struct SubcriticalTrial {
  GraphFunction u;
  SubcriticalLayout layout;
  SolitonParams soliton;
  double mu1 = 0.0;
  int N = 0;
  /// m E(phi_mu1, R) + sum of plateau energies, by continuous quadrature.
  double decomposedEnergy = 0.0;
};

/// \brief Soliton of mass mu1 threaded through the stubs of every cell, plateaus elsewhere.
///
/// mu1 is calibrated by bisection so that the discrete mass equals mu. When N <= 0 the
/// truncation grows until the dropped tail mass falls below 1e-9.
SubcriticalTrial subcritical_trial(const PeriodicSpec& s, double p, double mu, double h, int N = 0);

struct VanishingTrial {
  GraphFunction u;
  double alpha = 0.0;
  int n = 0;
};

/// \brief Plateau alpha_n on cells -n..n with linear ramps down to zero on the edges leaving it.
VanishingTrial vanishing_sequence(MeshPtr mesh, const PeriodicSpec& s, double mu, int n);

struct ConcentratingBump {
  GraphFunction u;
  /// Continuous critical energy of the unscaled profile v on [0, 1].
  double baseEnergy = 0.0;
  /// 0 for the polynomial profile, otherwise the soliton width used.
  double kappa = 0.0;
};

/// \brief sqrt(lambda) v(lambda (x - x0)) on one truncation edge, for a fixed mass-mu profile v on [0, 1].
ConcentratingBump concentrating_bump(MeshPtr mesh, EdgeIndex edge, double mu, double lambda);

struct SignpostParams {
  double gammaHalf = 0.5;
  double betaHalf = 0.5;
  double delta = 0.5;
  double c() const noexcept { return 2.0 * gammaHalf + 2.0 * betaHalf; }
};

struct SignpostTrial {
  GraphFunction w;
  GraphFunction u;
  double energyUpperBound = 0.0;
  /// Exact 1 - mu_R / |w|^2.
  double r = 0.0;
  /// Leading-order expansion of r in 1/lambda.
  double rAsymptotic = 0.0;
  /// Integral of |phi'|^2 over (gamma, gamma + beta) by quadrature.
  double q = 0.0;
  /// Same integral from the closed-form antiderivative with prefactor sqrt(3)/2.
  double qClosedForm = 0.0;
  double tailSum6 = 0.0;
  int N = 0;
  /// Edge masks on the truncation for the circle and bridge of cell 0.
  std::vector<bool> circle0;
  std::vector<bool> bridge0;
};

/// \brief Critical soliton folded onto the signpost graph, renormalized to mass mu_R.
SignpostTrial signpost_trial(const SignpostParams& sp, double lambda, double h, int N = 0);

}  // namespace pergraph
