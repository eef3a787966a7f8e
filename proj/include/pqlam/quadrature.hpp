#pragma once

// Gauss-Legendre panels and the adaptive coarea integrator used for
// distance-function moments int_0^r t^beta L(t) dt.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace pqlam {

namespace detail {

struct GaussLegendre24 {
  std::array<double, 24> node{};
  std::array<double, 24> weight{};
};

// Nodes/weights on [-1, 1] by Newton iteration on P_24.
inline GaussLegendre24 make_gl24() {
  constexpr int n = 24;
  GaussLegendre24 g;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.node[i] = -x;
    g.node[n - 1 - i] = x;
    g.weight[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    g.weight[n - 1 - i] = g.weight[i];
  }
  return g;
}

inline const GaussLegendre24& gl24() {
  static const GaussLegendre24 g = make_gl24();
  return g;
}

}  // namespace detail

/// 24-point Gauss-Legendre quadrature of f over [a, b].
template <typename F>
double gl_integrate(F&& f, double a, double b) {
  const auto& g = detail::gl24();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 24; ++i) acc += g.weight[i] * f(mid + half * g.node[i]);
  return acc * half;
}

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Integrates t^beta * profile(t) over [0, r]. 64 uniform panels, one level of
/// bisection refinement when a panel disagrees by more than 1e-10 of the total.
/// For beta < 1 the first panel is computed with the substitution u = t^(beta+1)
/// to remove the weak endpoint singularity.
template <typename F>
QuadratureResult integrate_moment_profile(F&& profile, double r, double beta,
                                          int panels = 64) {
  QuadratureResult out;
  if (!(r > 0.0)) return out;
  const double width = r / panels;
  auto integrand = [&](double t) { return std::pow(t, beta) * profile(t); };

  // rough total for the relative refinement threshold
  double rough = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * width, b = a + width;
    rough += (k == 0 && beta < 1.0)
                 ? std::pow(0.5 * (a + b), beta) * profile(0.5 * (a + b)) * width
                 : 0.5 * (integrand(a + 1e-14 * r) + integrand(b)) * width;
  }
  const double threshold = 1e-10 * std::max(std::abs(rough), 1e-300);

  for (int k = 0; k < panels; ++k) {
    const double a = k * width, b = a + width;
    double coarse, fine;
    if (k == 0 && beta < 1.0) {
      // int_0^b t^beta L(t) dt = 1/(beta+1) int_0^{b^{beta+1}} L(u^{1/(beta+1)}) du
      const double bp = beta + 1.0;
      auto sub = [&](double u) { return profile(std::pow(u, 1.0 / bp)); };
      const double ub = std::pow(b, bp);
      coarse = gl_integrate(sub, 0.0, ub) / bp;
      fine = (gl_integrate(sub, 0.0, 0.5 * ub) +
              gl_integrate(sub, 0.5 * ub, ub)) / bp;
    } else {
      coarse = gl_integrate(integrand, a, b);
      const double m = 0.5 * (a + b);
      fine = gl_integrate(integrand, a, m) + gl_integrate(integrand, m, b);
    }
    const double diff = std::abs(fine - coarse);
    out.value += (diff > threshold) ? fine : coarse;
    out.abs_error += diff;
  }
  return out;
}

}  // namespace pqlam
