#pragma once

// Scalar special functions shared by the geometry, moment and spectral
// modules: log-Gamma, Beta, generalized binomial coefficients and the
// volume of the unit ball.

#include <array>
#include <cmath>
#include <stdexcept>

namespace pqlam {

inline constexpr double kPi = 3.14159265358979323846;

/// Natural log of Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
/// Relative error stays below ~1e-13 on the range used here.
inline double log_gamma(double x) {
  static constexpr std::array<double, 9> coef{
      0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
      771.32342877765313,     -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  if (x < 0.5) {
    // reflection Gamma(x)Gamma(1-x) = pi / sin(pi x)
    return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double acc = coef[0];
  for (int i = 1; i < 9; ++i) acc += coef[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

inline double beta_function(double a, double b) {
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

/// Generalized binomial binom(n + beta, n) = Gamma(n+beta+1) / (Gamma(beta+1) n!).
/// Integral beta uses the exact product; otherwise log-Gamma.
inline double gamma_binom(int n, double beta) {
  if (n < 1) throw std::domain_error("gamma_binom: requires n >= 1");
  if (beta < 0.0) throw std::domain_error("gamma_binom: requires beta >= 0");
  const double rounded = std::nearbyint(beta);
  if (std::abs(beta - rounded) < 1e-12) {
    double prod = 1.0;
    for (int j = 1; j <= n; ++j) prod *= (rounded + j) / j;
    return prod;
  }
  return std::exp(log_gamma(n + beta + 1.0) - log_gamma(beta + 1.0) -
                  log_gamma(n + 1.0));
}

/// Lebesgue measure of the unit ball in dimension n.
inline double unit_ball_volume(int n) {
  if (n < 1) throw std::domain_error("unit_ball_volume: requires n >= 1");
  return std::pow(kPi, 0.5 * n) / std::exp(log_gamma(0.5 * n + 1.0));
}

/// Surface measure of the unit sphere in R^n, i.e. n * omega_n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace pqlam
