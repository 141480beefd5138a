#include "pergraph/solitons.hpp"

#include <cmath>

#include "pergraph/errors.hpp"

namespace pergraph {

double sech_power_integral(double k) {
  if (!(k > 0.0)) throw InputError("sech power must be positive");
  // sech^{2k}(y) <= 4^k exp(-2ky): cut where the tail drops below 1e-17.
  const double cut = (k * std::log(4.0) - std::log(2.0 * k) + 39.0) / (2.0 * k);
  const auto f = [k](double y) { return std::pow(1.0 / std::cosh(y), 2.0 * k); };
  return 2.0 * simpson(f, 0.0, cut, 40000);
}

double SolitonParams::phi1(double x) const {
  return A * std::pow(1.0 / std::cosh(a * x), 2.0 / (p - 2.0));
}

double SolitonParams::phi(double mu, double x) const {
  return std::pow(mu, alpha) * phi1(std::pow(mu, beta) * x);
}

SolitonParams soliton_params(double p) {
  if (!(p > 2.0 && p < 6.0)) throw InputError("soliton_params: p must lie in (2, 6)");
  SolitonParams s;
  s.p = p;
  s.alpha = 2.0 / (6.0 - p);
  s.beta = (p - 2.0) / (6.0 - p);
  const double k = 2.0 / (p - 2.0);
  const double integral = sech_power_integral(k);
  // u = A sech^k(a x) solves u'' + u^{p-1} = lambda u iff a = sqrt(lambda)/k, A^{p-2} = (p/2) lambda.
  const auto shape = [&](double lambda, double& A, double& a) {
    a = std::sqrt(lambda) / k;
    A = std::pow(0.5 * p * lambda, 1.0 / (p - 2.0));
  };
  const auto mass = [&](double lambda) {
    double A = 0.0, a = 0.0;
    shape(lambda, A, a);
    return A * A / a * integral;
  };
  double lo = 1e-3, hi = 1.0;
  while (mass(lo) > 1.0) lo *= 0.5;
  while (mass(hi) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < 1.0 ? lo : hi) = mid;
  }
  s.lambda = 0.5 * (lo + hi);
  shape(s.lambda, s.A, s.a);
  return s;
}

CriticalSoliton::CriticalSoliton(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0)) throw InputError("critical soliton needs lambda > 0");
}

double CriticalSoliton::operator()(double x) const {
  const double z = 2.0 * lambda_ * x / std::numbers::sqrt3;
  return std::sqrt(lambda_ / std::cosh(z));
}

double CriticalSoliton::derivative(double x) const {
  const double z = 2.0 * lambda_ * x / std::numbers::sqrt3;
  return -lambda_ * std::sqrt(lambda_ / std::cosh(z)) * std::tanh(z) / std::numbers::sqrt3;
}

CriticalSoliton critical_soliton(double lambda) { return CriticalSoliton(lambda); }

}  // namespace pergraph
