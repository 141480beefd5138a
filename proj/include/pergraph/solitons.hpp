#pragma once

#include <numbers>

namespace pergraph {

/// Mass threshold of the critical problem on the line.
inline constexpr double mu_R = std::numbers::sqrt3 * std::numbers::pi / 2.0;
/// Mass threshold of the critical problem on the half-line.
inline constexpr double mu_R_plus = std::numbers::sqrt3 * std::numbers::pi / 4.0;

/// \brief Unit-mass soliton phi_1(x) = A sech^{2/(p-2)}(a x) of u'' + u^{p-1} = lambda u.
struct SolitonParams {
  double p = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double A = 0.0;
  double a = 0.0;
  double lambda = 0.0;

  double phi1(double x) const;
  /// phi_mu(x) = mu^alpha phi_1(mu^beta x), the soliton of mass mu.
  double phi(double mu, double x) const;
};

/// \brief Solves for A and a by bisection on the unit-mass condition.
SolitonParams soliton_params(double p);

/// \f$\int_{\mathbb R} \mathrm{sech}^{2k}\f$ by composite Simpson quadrature.
double sech_power_integral(double k);

/// \brief Critical soliton sqrt(lambda) * sqrt(sech(2 lambda x / sqrt 3)); mass mu_R for every lambda.
class CriticalSoliton {
 public:
  explicit CriticalSoliton(double lambda);

  double lambda() const noexcept { return lambda_; }
  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double lambda_;
};

CriticalSoliton critical_soliton(double lambda);

/// Composite Simpson rule with n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

}  // namespace pergraph
