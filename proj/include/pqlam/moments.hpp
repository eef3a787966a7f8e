#pragma once

// Distance-function moments D_beta = int d^beta and their sharp geometric
// envelopes, the alpha root of the profile polynomial identity, the
// one-dimensional gap polynomial and Borell reverse-Hoelder ratios.

#include <cmath>
#include <string>

#include "pqlam/geometry.hpp"
#include "pqlam/quadrature.hpp"
#include "pqlam/special.hpp"

namespace pqlam {

enum class MomentMethod { automatic, analytic, coarea_quadrature, grid };

inline const char* to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::automatic: return "auto";
    case MomentMethod::analytic: return "analytic";
    case MomentMethod::coarea_quadrature: return "coarea-quadrature";
    case MomentMethod::grid: return "grid";
  }
  return "?";
}

struct MomentResult {
  double beta = 0.0;
  double value = 0.0;
  MomentMethod method = MomentMethod::analytic;
  double abs_error_estimate = 0.0;
};

/// Metric-only bounds bracketing D_beta on convex bodies. The perimeter-volume
/// pair is proved only for beta >= 1; below that it is reported but flagged
/// as not asserted.
struct MomentEnvelope {
  double beta = 0.0;
  double larson_lower = 0.0;  // (1/N) binom^{-1} P r^{beta+1}
  double prizag_upper = 0.0;  // |O| r^beta / (beta+1)
  double ball_lower = 0.0;    // binom^{-1} r^beta |O|
  double pv_lower = 0.0;      // |O|^{beta+1} / ((beta+1) P^beta)
  double pv_upper = 0.0;      // N^beta binom^{-1} |O|^{beta+1} / P^beta
  bool pv_asserted = true;
};

struct AlphaRoot {
  double alpha = 0.0;     // in (0, 1/r]
  double residual = 0.0;  // |f(alpha) - |O|/P|
  bool clamped = false;   // metrics violated 1/N <= |O|/(rP) by noise
};

namespace detail {

inline void require_convex_moment(const ConvexBody& b, const char* op) {
  if (!b.convex)
    throw unsupported_error(std::string(op) +
                            ": nonconvex bodies are not supported");
}

/// Coefficients of L(t) for a box: L is a single polynomial piece on
/// [0, min w) since every face shrinks linearly until the thinnest axis dies.
inline std::vector<double> box_profile_coeffs(const std::vector<double>& w) {
  const size_t n = w.size();
  std::vector<double> total(n, 0.0);  // degree n-1
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> poly{2.0};  // running product of 2(w_j - t)
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<double> next(poly.size() + 1, 0.0);
      for (size_t m = 0; m < poly.size(); ++m) {
        next[m] += poly[m] * 2.0 * w[j];
        next[m + 1] -= poly[m] * 2.0;
      }
      poly = std::move(next);
    }
    for (size_t m = 0; m < poly.size(); ++m) total[m] += poly[m];
  }
  return total;
}

}  // namespace detail

/// D_beta(body) = int_body d^beta dx through the coarea identity
/// int_0^r t^beta L(t) dt. Balls, boxes, slabs and thin cones run on closed
/// forms; general polygons use adaptive Gauss-Legendre panels on the offset
/// profile.
inline MomentResult moment(const ConvexBody& b, double beta,
                           MomentMethod method = MomentMethod::automatic,
                           int grid_resolution = 768) {
  detail::require_convex_moment(b, "moment");
  if (beta < 0.0) throw validation_error("moment: beta must be >= 0");
  MomentResult out;
  out.beta = beta;

  if (method == MomentMethod::grid) {
    // plain midpoint rasterization; coarse cross-check path
    const GeometricSummary g = metrics(b);
    if (b.dim != 2)
      throw unsupported_error("moment: grid method is planar only");
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    if (detail::polygon_backed(b)) {
      x0 = y0 = std::numeric_limits<double>::infinity();
      x1 = y1 = -x0;
      for (const Vec2& v : b.vertices) {
        x0 = std::min(x0, v.x); x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y); y1 = std::max(y1, v.y);
      }
    } else if (b.kind == BodyKind::ball) {
      x0 = b.center[0] - b.radius; x1 = b.center[0] + b.radius;
      y0 = b.center[1] - b.radius; y1 = b.center[1] + b.radius;
    } else {
      const auto w = detail::box_half_widths(b);
      x0 = -w[0]; x1 = w[0]; y0 = -w[1]; y1 = w[1];
    }
    const int n = grid_resolution;
    const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 p{x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy};
        const double d = (b.kind == BodyKind::slab)
                             ? distance_to_boundary(b, Vec2{p.x, p.y + 0.5})
                             : distance_to_boundary(b, p);
        if (d > 0.0) acc += std::pow(d, beta);
      }
    out.value = acc * hx * hy;
    out.method = MomentMethod::grid;
    out.abs_error_estimate = g.volume * std::pow(g.inradius, beta) * 4.0 / n;
    return out;
  }

  const bool analytic_kind =
      b.kind == BodyKind::ball || b.kind == BodyKind::box ||
      b.kind == BodyKind::slab || b.kind == BodyKind::thin_cone;
  const bool use_analytic =
      method == MomentMethod::analytic ||
      (method == MomentMethod::automatic && analytic_kind);

  if (use_analytic) {
    out.method = MomentMethod::analytic;
    switch (b.kind) {
      case BodyKind::ball:
        out.value = unit_ball_volume(b.dim) * std::pow(b.radius, b.dim + beta) /
                    gamma_binom(b.dim, beta);
        return out;
      case BodyKind::box:
      case BodyKind::slab: {
        const auto w = detail::box_half_widths(b);
        const double r = *std::min_element(w.begin(), w.end());
        const auto c = detail::box_profile_coeffs(w);
        double acc = 0.0;
        for (size_t m = 0; m < c.size(); ++m)
          acc += c[m] * std::pow(r, beta + m + 1) / (beta + m + 1);
        out.value = acc;
        return out;
      }
      case BodyKind::thin_cone: {
        const GeometricSummary g = metrics(b);
        // L(t) = P (1 - t/r)^{N-1} exactly: tangent body profile
        out.value = g.perimeter * std::pow(g.inradius, beta + 1.0) *
                    beta_function(beta + 1.0, b.dim);
        return out;
      }
      default:
        throw unsupported_error("moment: no closed form for this kind");
    }
  }

  // coarea quadrature on the inner parallel profile
  const GeometricSummary g = metrics(b);
  auto profile = [&](double t) { return inner_parallel_perimeter(b, t); };
  const QuadratureResult q = integrate_moment_profile(profile, g.inradius, beta);
  out.value = q.value;
  out.abs_error_estimate = q.abs_error;
  out.method = MomentMethod::coarea_quadrature;
  return out;
}

inline MomentEnvelope moment_envelope(const ConvexBody& b, double beta) {
  detail::require_convex_moment(b, "moment_envelope");
  if (beta < 0.0) throw validation_error("moment_envelope: beta must be >= 0");
  const GeometricSummary g = metrics(b);
  const int n = b.dim;
  const double binom = gamma_binom(n, beta);
  MomentEnvelope e;
  e.beta = beta;
  e.larson_lower =
      g.perimeter * std::pow(g.inradius, beta + 1.0) / (n * binom);
  e.prizag_upper = g.volume * std::pow(g.inradius, beta) / (beta + 1.0);
  e.ball_lower = g.volume * std::pow(g.inradius, beta) / binom;
  e.pv_lower = std::pow(g.volume, beta + 1.0) /
               ((beta + 1.0) * std::pow(g.perimeter, beta));
  e.pv_upper = std::pow(static_cast<double>(n), beta) / binom *
               std::pow(g.volume, beta + 1.0) / std::pow(g.perimeter, beta);
  e.pv_asserted = beta >= 1.0 || beta == 0.0;
  return e;
}

/// Solves |O|/P = (1 - (1 - alpha r)^N) / (N alpha) for alpha in (0, 1/r].
/// The map is strictly decreasing from r (alpha -> 0) to r/N (alpha = 1/r),
/// so bisection always brackets.
inline AlphaRoot alpha_of(const ConvexBody& b) {
  detail::require_convex_moment(b, "alpha_of");
  const GeometricSummary g = metrics(b);
  const double r = g.inradius;
  const double target = g.volume / g.perimeter;
  const int n = b.dim;
  auto f = [&](double t) {
    return (1.0 - std::pow(1.0 - t * r, n)) / (n * t);
  };
  AlphaRoot out;
  if (target <= r / n) {
    // numeric noise below the sharp floor: clamp to the tangent-body root
    out.alpha = 1.0 / r;
    out.residual = std::abs(f(out.alpha) - target);
    out.clamped = target < r / n - 1e-12 * r;
    return out;
  }
  double lo = 1e-18 / r, hi = 1.0 / r;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
  }
  out.alpha = 0.5 * (lo + hi);
  out.residual = std::abs(f(out.alpha) - target);
  return out;
}

/// F_N(x) = x^{2N} + (N-1) x^N - N x^{N+1}, the nonnegative gap polynomial of
/// the averaged-profile inequality; zero exactly at x in {0, 1}.
inline double step1_gap(int n, double x) {
  if (n < 2) throw validation_error("step1_gap: N must be >= 2");
  const double xn = std::pow(x, n);
  return xn * (xn + (n - 1) - n * x);
}

/// Reverse-Hoelder ratio for f = d: ((avg d^s)^{1/s}) / (C_{s,q} (avg d^q)^{1/q})
/// with C_{s,q} = binom(N+q,N)^{1/q} binom(N+s,N)^{-1/s}. At most 1 on convex
/// bodies; exactly 1 on balls.
inline double borell_ratio(const ConvexBody& b, double q, double s) {
  detail::require_convex_moment(b, "borell_ratio");
  if (!(q > 0.0) || !(s >= q))
    throw validation_error("borell_ratio: needs 0 < q <= s");
  const GeometricSummary g = metrics(b);
  const double mq = moment(b, q).value / g.volume;
  const double ms = moment(b, s).value / g.volume;
  const double c = std::pow(gamma_binom(b.dim, q), 1.0 / q) /
                   std::pow(gamma_binom(b.dim, s), 1.0 / s);
  return std::pow(ms, 1.0 / s) / (c * std::pow(mq, 1.0 / q));
}

}  // namespace pqlam
