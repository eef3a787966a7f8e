#pragma once

// Convex bodies and their purely geometric functionals: volume, perimeter,
// inradius/incenter, boundary distance, inner parallel sets, Minkowski gauge
// and scaling. Planar polygons back most numeric paths; balls, boxes, slabs
// and thin cones carry closed forms in any dimension.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqlam/special.hpp"

namespace pqlam {

struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class BodyKind {
  polygon,
  ball,
  box,
  slab,
  thin_cone,
  tangent_polytope,
  slit_square,
  perturbed_ball,
};

inline const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::polygon: return "polygon";
    case BodyKind::ball: return "ball";
    case BodyKind::box: return "box";
    case BodyKind::slab: return "slab";
    case BodyKind::thin_cone: return "thin_cone";
    case BodyKind::tangent_polytope: return "tangent_polytope";
    case BodyKind::slit_square: return "slit_square";
    case BodyKind::perturbed_ball: return "perturbed_ball";
  }
  return "?";
}

/// Tagged union of the supported geometric representations. Only the payload
/// fields of the active kind are meaningful. Immutable after build_body.
struct ConvexBody {
  BodyKind kind = BodyKind::polygon;
  int dim = 2;
  bool convex = true;

  std::vector<Vec2> vertices;       // polygon / tangent_polytope / perturbed_ball
  std::vector<double> center;      // ball center; recorded inball center (tangent)
  double radius = 0.0;             // ball radius; recorded inball radius (tangent)
  std::vector<double> half_widths; // box
  double slab_length = 0.0;        // slab parameter L
  double cone_eps = 0.0;           // thin cone aperture (dim >= 3)
  double cone_scale = 1.0;         // thin cone homothety factor
  int slit_count = 0;              // slit square
  int wave_freq = 0;               // perturbed ball oscillation frequency
  double wave_amp = 0.0;           // perturbed ball amplitude
};

/// Descriptor record consumed by build_body; mirrors the JSON schema.
struct BodySpec {
  std::string kind;
  int dim = 2;
  std::vector<Vec2> vertices;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> half_widths;
  double L = 0.0;
  double epsilon = 0.0;
  std::vector<Vec2> normals;
  double R = 0.0;
  int n = 0;
  int k = 0;
  double a = 0.0;
};

struct GeometricSummary {
  double volume = 0.0;
  double perimeter = 0.0;
  double inradius = 0.0;
  std::vector<double> incenter;
  bool convex = true;
  bool exact = true;  // analytic closed form vs numeric provenance
};

// ---------------------------------------------------------------------------
// polygon primitives

namespace detail {

inline double polygon_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    s += cross(p, q);
  }
  return 0.5 * s;
}

inline double polygon_perimeter(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += norm(v[(i + 1) % v.size()] - v[i]);
  return s;
}

inline double polygon_scale(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (const Vec2& p : v) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return std::max(s, 1e-12);
}

struct Facet {
  Vec2 n;     // outward unit normal
  double d;   // offset, boundary line is n.x = d
};

/// Outward facets of a CCW convex polygon.
inline std::vector<Facet> polygon_facets(const std::vector<Vec2>& v) {
  std::vector<Facet> fs;
  fs.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    const double len = norm(e);
    const Vec2 n{e.y / len, -e.x / len};
    fs.push_back({n, dot(n, v[i])});
  }
  return fs;
}

/// Sutherland-Hodgman clip of a convex polygon by the half-plane n.x <= c.
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n,
                                        double c) {
  std::vector<Vec2> out;
  const size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 1);
  for (size_t i = 0; i < m; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % m];
    const double fa = dot(n, a) - c;
    const double fb = dot(n, b) - c;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

/// Chebyshev center of a convex polygon: the tiny LP
///   max r  s.t.  n_i . c + r <= d_i
/// solved by exhaustive active-set enumeration (3 active constraints at the
/// optimum; the polygons handled here have a few dozen facets at most).
inline void chebyshev_center(const std::vector<Vec2>& verts, Vec2& center,
                             double& inradius) {
  const auto fs = polygon_facets(verts);
  const size_t m = fs.size();
  const double scale = polygon_scale(verts);
  const double tol = 1e-9 * scale;
  double best_r = -1.0;
  Vec2 best_c{};
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = j + 1; k < m; ++k) {
        // solve [n_i 1; n_j 1; n_k 1] (cx, cy, r) = (d_i, d_j, d_k)
        const double a11 = fs[i].n.x, a12 = fs[i].n.y;
        const double a21 = fs[j].n.x, a22 = fs[j].n.y;
        const double a31 = fs[k].n.x, a32 = fs[k].n.y;
        const double det = a11 * (a22 - a32) - a12 * (a21 - a31) +
                           (a21 * a32 - a22 * a31);
        if (std::abs(det) < 1e-12) continue;
        const double b1 = fs[i].d, b2 = fs[j].d, b3 = fs[k].d;
        const double cx = (b1 * (a22 - a32) - a12 * (b2 - b3) +
                           (b2 * a32 - a22 * b3)) / det;
        const double cy = (a11 * (b2 - b3) - b1 * (a21 - a31) +
                           (a21 * b3 - b2 * a31)) / det;
        const double r = (a11 * (a22 * b3 - b2 * a32) -
                          a12 * (a21 * b3 - b2 * a31) +
                          b1 * (a21 * a32 - a22 * a31)) / det;
        if (r <= best_r) continue;
        bool feasible = true;
        for (size_t q = 0; q < m && feasible; ++q)
          feasible = fs[q].n.x * cx + fs[q].n.y * cy + r <= fs[q].d + tol;
        if (feasible) {
          best_r = r;
          best_c = {cx, cy};
        }
      }
  if (best_r <= 0.0)
    throw validation_error("chebyshev_center: degenerate polygon");
  center = best_c;
  inradius = best_r;
}

/// CCW orientation, consecutive-duplicate removal, collinear-vertex removal,
/// then a strict convexity check. Throws on self-intersecting or degenerate
/// input.
inline std::vector<Vec2> normalize_convex_polygon(std::vector<Vec2> v) {
  if (v.size() < 3) throw validation_error("polygon: needs at least 3 vertices");
  if (polygon_area(v) < 0.0) std::reverse(v.begin(), v.end());
  const double scale = polygon_scale(v);
  // drop consecutive duplicates
  std::vector<Vec2> w;
  for (const Vec2& p : v)
    if (w.empty() || norm(p - w.back()) > 1e-12 * scale) w.push_back(p);
  while (w.size() > 1 && norm(w.front() - w.back()) <= 1e-12 * scale)
    w.pop_back();
  // drop collinear middles
  const double eps = 1e-12 * scale * scale;
  for (bool changed = true; changed && w.size() > 3;) {
    changed = false;
    for (size_t i = 0; i < w.size(); ++i) {
      const Vec2 a = w[(i + w.size() - 1) % w.size()];
      const Vec2 b = w[i];
      const Vec2 c = w[(i + 1) % w.size()];
      if (std::abs(cross(b - a, c - b)) <= eps) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (w.size() < 3 || polygon_area(w) <= 1e-12 * scale * scale)
    throw validation_error("polygon: degenerate (zero area)");
  for (size_t i = 0; i < w.size(); ++i) {
    const Vec2 a = w[(i + w.size() - 1) % w.size()];
    const Vec2 b = w[i];
    const Vec2 c = w[(i + 1) % w.size()];
    if (cross(b - a, c - b) <= eps)
      throw validation_error("polygon: not strictly convex in CCW order");
  }
  return w;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

inline bool point_in_polygon_crossing(const std::vector<Vec2>& v, Vec2 p) {
  bool inside = false;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const bool cond = (v[i].y > p.y) != (v[j].y > p.y);
    if (cond) {
      const double xi =
          v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

// slit square helpers: (0,1)^2 minus the segments {i/n} x (0, 1-1/n)

inline double slit_square_distance(int n, Vec2 p) {
  double d = std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
  if (d <= 0.0) return 0.0;
  const double ytop = 1.0 - 1.0 / n;
  for (int i = 1; i < n; ++i) {
    const double dx = p.x - static_cast<double>(i) / n;
    const double dy = p.y > ytop ? p.y - ytop : 0.0;
    d = std::min(d, std::hypot(dx, dy));
  }
  return d;
}

/// Inradius of the slit square by a discrete distance transform with local
/// grid refinement around the maximizer.
inline void slit_square_inradius(int n, Vec2& center, double& inradius) {
  double best = -1.0;
  Vec2 arg{0.5, 0.5};
  const int g = 512;
  for (int i = 1; i < g; ++i)
    for (int j = 1; j < g; ++j) {
      const Vec2 p{static_cast<double>(i) / g, static_cast<double>(j) / g};
      const double d = slit_square_distance(n, p);
      if (d > best) {
        best = d;
        arg = p;
      }
    }
  double h = 1.0 / g;
  for (int level = 0; level < 5; ++level) {
    const int loc = 20;
    const double step = 2.0 * h / loc;
    Vec2 next = arg;
    for (int i = -loc; i <= loc; ++i)
      for (int j = -loc; j <= loc; ++j) {
        const Vec2 p{arg.x + i * step, arg.y + j * step};
        const double d = slit_square_distance(n, p);
        if (d > best) {
          best = d;
          next = p;
        }
      }
    arg = next;
    h = 2.0 * step;
  }
  center = arg;
  inradius = best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// construction

namespace detail {

inline ConvexBody make_polygon_body(std::vector<Vec2> verts) {
  ConvexBody b;
  b.kind = BodyKind::polygon;
  b.dim = 2;
  b.convex = true;
  b.vertices = normalize_convex_polygon(std::move(verts));
  return b;
}

inline ConvexBody make_tangent_polytope_body(const std::vector<Vec2>& normals,
                                             double R,
                                             std::vector<double> center) {
  if (!(R > 0.0)) throw validation_error("tangent_polytope: R must be > 0");
  if (normals.size() < 3)
    throw validation_error("tangent_polytope: needs at least 3 normals");
  if (center.empty()) center = {0.0, 0.0};
  if (center.size() != 2)
    throw validation_error("tangent_polytope: only dim 2 is supported");
  const Vec2 c{center[0], center[1]};
  // clip a generous box by every tangent half-plane <x - c, u> <= R
  const double big = 64.0 * R;
  std::vector<Vec2> poly{{c.x - big, c.y - big},
                         {c.x + big, c.y - big},
                         {c.x + big, c.y + big},
                         {c.x - big, c.y + big}};
  for (const Vec2& u : normals) {
    const double len = norm(u);
    if (len < 1e-12) throw validation_error("tangent_polytope: zero normal");
    const Vec2 un{u.x / len, u.y / len};
    poly = clip_halfplane(poly, un, dot(un, c) + R);
    if (poly.empty())
      throw validation_error("tangent_polytope: empty intersection");
  }
  for (const Vec2& p : poly)
    if (std::max(std::abs(p.x - c.x), std::abs(p.y - c.y)) > 0.9 * big)
      throw validation_error(
          "tangent_polytope: normals do not span the plane (unbounded)");
  ConvexBody b;
  b.kind = BodyKind::tangent_polytope;
  b.dim = 2;
  b.convex = true;
  b.vertices = normalize_convex_polygon(std::move(poly));
  b.center = {c.x, c.y};
  b.radius = R;  // recorded inscribed ball
  return b;
}

}  // namespace detail

inline ConvexBody build_body(const BodySpec& spec) {
  if (spec.kind == "polygon") {
    return detail::make_polygon_body(spec.vertices);
  }
  if (spec.kind == "ball") {
    if (!(spec.radius > 0.0)) throw validation_error("ball: radius must be > 0");
    if (spec.dim < 2) throw validation_error("ball: dim must be >= 2");
    ConvexBody b;
    b.kind = BodyKind::ball;
    b.dim = spec.dim;
    b.radius = spec.radius;
    b.center = spec.center;
    if (b.center.empty()) b.center.assign(spec.dim, 0.0);
    if (static_cast<int>(b.center.size()) != spec.dim)
      throw validation_error("ball: center/dim mismatch");
    return b;
  }
  if (spec.kind == "box") {
    if (spec.half_widths.size() < 2)
      throw validation_error("box: needs at least 2 half-widths");
    for (double w : spec.half_widths)
      if (!(w > 0.0)) throw validation_error("box: half-widths must be > 0");
    ConvexBody b;
    b.kind = BodyKind::box;
    b.dim = static_cast<int>(spec.half_widths.size());
    b.half_widths = spec.half_widths;
    return b;
  }
  if (spec.kind == "slab") {
    if (!(spec.L > 0.0)) throw validation_error("slab: L must be > 0");
    if (spec.dim < 2) throw validation_error("slab: dim must be >= 2");
    ConvexBody b;
    b.kind = BodyKind::slab;
    b.dim = spec.dim;
    b.slab_length = spec.L;
    return b;
  }
  if (spec.kind == "thin_cone") {
    if (!(spec.epsilon > 0.0))
      throw validation_error("thin_cone: epsilon must be > 0");
    if (spec.dim < 2) throw validation_error("thin_cone: dim must be >= 2");
    if (spec.dim == 2) {
      // lowered to the triangle |x| < 1, 0 < y < eps (1 - |x|)
      return detail::make_polygon_body(
          {{-1.0, 0.0}, {1.0, 0.0}, {0.0, spec.epsilon}});
    }
    ConvexBody b;
    b.kind = BodyKind::thin_cone;
    b.dim = spec.dim;
    b.cone_eps = spec.epsilon;
    b.cone_scale = 1.0;
    return b;
  }
  if (spec.kind == "tangent_polytope") {
    return detail::make_tangent_polytope_body(spec.normals, spec.R, spec.center);
  }
  if (spec.kind == "slit_square") {
    if (spec.n < 2) throw validation_error("slit_square: n must be >= 2");
    ConvexBody b;
    b.kind = BodyKind::slit_square;
    b.dim = 2;
    b.convex = false;
    b.slit_count = spec.n;
    return b;
  }
  if (spec.kind == "perturbed_ball") {
    if (spec.k < 1) throw validation_error("perturbed_ball: k must be >= 1");
    if (!(spec.a > 0.0 && spec.a < 0.5))
      throw validation_error("perturbed_ball: a must lie in (0, 1/2)");
    ConvexBody b;
    b.kind = BodyKind::perturbed_ball;
    b.dim = 2;
    b.convex = false;
    b.wave_freq = spec.k;
    b.wave_amp = spec.a;
    // polar graph rho(theta) = 1 + a sin(k theta), sampled densely
    const int m = std::max(256, 64 * spec.k);
    b.vertices.reserve(m);
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * kPi * i / m;
      const double rho = 1.0 + spec.a * std::sin(spec.k * th);
      b.vertices.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
    return b;
  }
  throw validation_error("build_body: unknown kind '" + spec.kind + "'");
}

// convenience constructors used throughout tests and the harness

inline ConvexBody make_polygon(std::vector<Vec2> verts) {
  BodySpec s;
  s.kind = "polygon";
  s.vertices = std::move(verts);
  return build_body(s);
}

inline ConvexBody make_ball(int dim, double radius,
                            std::vector<double> center = {}) {
  BodySpec s;
  s.kind = "ball";
  s.dim = dim;
  s.radius = radius;
  s.center = std::move(center);
  return build_body(s);
}

inline ConvexBody make_box(std::vector<double> half_widths) {
  BodySpec s;
  s.kind = "box";
  s.half_widths = std::move(half_widths);
  return build_body(s);
}

inline ConvexBody make_slab(int dim, double L) {
  BodySpec s;
  s.kind = "slab";
  s.dim = dim;
  s.L = L;
  return build_body(s);
}

inline ConvexBody make_thin_cone(int dim, double eps) {
  BodySpec s;
  s.kind = "thin_cone";
  s.dim = dim;
  s.epsilon = eps;
  return build_body(s);
}

inline ConvexBody make_tangent_polytope(std::vector<Vec2> normals, double R,
                                        std::vector<double> center = {}) {
  BodySpec s;
  s.kind = "tangent_polytope";
  s.normals = std::move(normals);
  s.R = R;
  s.center = std::move(center);
  return build_body(s);
}

inline ConvexBody make_slit_square(int n) {
  BodySpec s;
  s.kind = "slit_square";
  s.n = n;
  return build_body(s);
}

inline ConvexBody make_perturbed_ball(int k, double a) {
  BodySpec s;
  s.kind = "perturbed_ball";
  s.k = k;
  s.a = a;
  return build_body(s);
}

// ---------------------------------------------------------------------------
// metrics

namespace detail {

inline bool polygon_backed(const ConvexBody& b) {
  return b.kind == BodyKind::polygon || b.kind == BodyKind::tangent_polytope;
}

inline double cone_inradius_factor(double eps) {
  // axial point equidistant from the base and the lateral surface
  return eps / (1.0 + std::sqrt(1.0 + eps * eps));
}

inline std::vector<double> box_half_widths(const ConvexBody& b) {
  if (b.kind == BodyKind::box) return b.half_widths;
  // slab (-L/2, L/2)^{N-1} x (0, 1), centered for width purposes
  std::vector<double> w(static_cast<size_t>(b.dim), 0.5 * b.slab_length);
  w.back() = 0.5;
  return w;
}

inline double box_surface(const std::vector<double>& w) {
  double s = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    double face = 2.0;
    for (size_t j = 0; j < w.size(); ++j)
      if (j != i) face *= 2.0 * w[j];
    s += face;
  }
  return s;
}

}  // namespace detail

inline GeometricSummary metrics(const ConvexBody& b) {
  GeometricSummary out;
  out.convex = b.convex;
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope: {
      out.volume = detail::polygon_area(b.vertices);
      out.perimeter = detail::polygon_perimeter(b.vertices);
      if (b.kind == BodyKind::tangent_polytope) {
        out.inradius = b.radius;
        out.incenter = b.center;
      } else {
        Vec2 c;
        double r;
        detail::chebyshev_center(b.vertices, c, r);
        out.inradius = r;
        out.incenter = {c.x, c.y};
      }
      return out;
    }
    case BodyKind::ball: {
      const double wn = unit_ball_volume(b.dim);
      out.volume = wn * std::pow(b.radius, b.dim);
      out.perimeter = b.dim * wn * std::pow(b.radius, b.dim - 1);
      out.inradius = b.radius;
      out.incenter = b.center;
      return out;
    }
    case BodyKind::box:
    case BodyKind::slab: {
      const auto w = detail::box_half_widths(b);
      double vol = 1.0;
      for (double wi : w) vol *= 2.0 * wi;
      out.volume = vol;
      out.perimeter = detail::box_surface(w);
      out.inradius = *std::min_element(w.begin(), w.end());
      out.incenter.assign(w.size(), 0.0);
      if (b.kind == BodyKind::slab) out.incenter.back() = 0.5;
      return out;
    }
    case BodyKind::thin_cone: {
      const double s = b.cone_scale;
      const double eps = b.cone_eps;
      const double wn1 = unit_ball_volume(b.dim - 1);
      out.volume = std::pow(s, b.dim) * eps * wn1 / b.dim;
      out.perimeter = std::pow(s, b.dim - 1) * wn1 *
                      (1.0 + std::sqrt(1.0 + eps * eps));
      out.inradius = s * detail::cone_inradius_factor(eps);
      out.incenter.assign(static_cast<size_t>(b.dim), 0.0);
      out.incenter.back() = out.inradius;
      return out;
    }
    case BodyKind::slit_square: {
      out.volume = 1.0;    // slits are null sets
      out.perimeter = 4.0; // measure-theoretic perimeter of the unit square
      Vec2 c;
      double r;
      detail::slit_square_inradius(b.slit_count, c, r);
      out.inradius = r;
      out.incenter = {c.x, c.y};
      out.exact = false;
      return out;
    }
    case BodyKind::perturbed_ball: {
      out.volume = detail::polygon_area(b.vertices);
      out.perimeter = detail::polygon_perimeter(b.vertices);
      // largest sampled ball centered at the origin
      double r = std::numeric_limits<double>::infinity();
      const auto& v = b.vertices;
      for (size_t i = 0; i < v.size(); ++i)
        r = std::min(r, detail::point_segment_distance(
                            Vec2{0.0, 0.0}, v[i], v[(i + 1) % v.size()]));
      out.inradius = r;
      out.incenter = {0.0, 0.0};
      out.exact = false;
      return out;
    }
  }
  throw unsupported_error("metrics: unhandled kind");
}

// ---------------------------------------------------------------------------
// boundary distance

inline double distance_to_boundary(const ConvexBody& b,
                                   std::span<const double> x) {
  if (static_cast<int>(x.size()) != b.dim)
    throw validation_error("distance_to_boundary: point/body dim mismatch");
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope: {
      const Vec2 p{x[0], x[1]};
      double d = std::numeric_limits<double>::infinity();
      for (const auto& f : detail::polygon_facets(b.vertices))
        d = std::min(d, f.d - dot(f.n, p));
      return std::max(d, 0.0);
    }
    case BodyKind::ball: {
      double s = 0.0;
      for (int i = 0; i < b.dim; ++i)
        s += (x[i] - b.center[i]) * (x[i] - b.center[i]);
      return std::max(b.radius - std::sqrt(s), 0.0);
    }
    case BodyKind::box: {
      double d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < b.dim; ++i)
        d = std::min(d, b.half_widths[i] - std::abs(x[i]));
      return std::max(d, 0.0);
    }
    case BodyKind::slab: {
      double d = std::numeric_limits<double>::infinity();
      for (int i = 0; i + 1 < b.dim; ++i)
        d = std::min(d, 0.5 * b.slab_length - std::abs(x[i]));
      d = std::min(d, std::min(x[b.dim - 1], 1.0 - x[b.dim - 1]));
      return std::max(d, 0.0);
    }
    case BodyKind::thin_cone: {
      double rho = 0.0;
      for (int i = 0; i + 1 < b.dim; ++i) rho += x[i] * x[i];
      rho = std::sqrt(rho);
      const double y = x[b.dim - 1];
      const double eps = b.cone_eps;
      const double lateral =
          (eps * (b.cone_scale - rho) - y) / std::sqrt(1.0 + eps * eps);
      return std::max(std::min(y, lateral), 0.0);
    }
    case BodyKind::slit_square:
      return detail::slit_square_distance(b.slit_count, Vec2{x[0], x[1]});
    case BodyKind::perturbed_ball: {
      const Vec2 p{x[0], x[1]};
      if (!detail::point_in_polygon_crossing(b.vertices, p)) return 0.0;
      double d = std::numeric_limits<double>::infinity();
      const auto& v = b.vertices;
      for (size_t i = 0; i < v.size(); ++i)
        d = std::min(d,
                     detail::point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
      return d;
    }
  }
  throw unsupported_error("distance_to_boundary: unhandled kind");
}

inline double distance_to_boundary(const ConvexBody& b, Vec2 p) {
  const double xy[2] = {p.x, p.y};
  return distance_to_boundary(b, std::span<const double>(xy, 2));
}

// ---------------------------------------------------------------------------
// inner parallel sets

/// Perimeter L(t) of the inner parallel set { x : d(x) > t }. Convex kinds
/// only; monotone nonincreasing in t and zero past the inradius.
inline double inner_parallel_perimeter(const ConvexBody& b, double t) {
  if (!b.convex)
    throw unsupported_error(
        "inner_parallel_perimeter: requires a convex body");
  if (t < 0.0) throw validation_error("inner_parallel_perimeter: t >= 0");
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope: {
      std::vector<Vec2> poly = b.vertices;
      for (const auto& f : detail::polygon_facets(b.vertices)) {
        poly = detail::clip_halfplane(poly, f.n, f.d - t);
        if (poly.size() < 3) return 0.0;
      }
      return detail::polygon_perimeter(poly);
    }
    case BodyKind::ball: {
      if (t >= b.radius) return 0.0;
      return unit_sphere_area(b.dim) * std::pow(b.radius - t, b.dim - 1);
    }
    case BodyKind::box:
    case BodyKind::slab: {
      auto w = detail::box_half_widths(b);
      for (double& wi : w) {
        wi -= t;
        if (wi <= 0.0) return 0.0;
      }
      return detail::box_surface(w);
    }
    case BodyKind::thin_cone: {
      // homothetic to its form body, so the profile collapses linearly
      const GeometricSummary g = metrics(b);
      if (t >= g.inradius) return 0.0;
      return g.perimeter * std::pow(1.0 - t / g.inradius, b.dim - 1);
    }
    default:
      throw unsupported_error("inner_parallel_perimeter: unsupported kind");
  }
}

// ---------------------------------------------------------------------------
// Minkowski gauge

/// Gauge j(x) of the body translated so its incenter sits at the origin:
/// positively 1-homogeneous, equal to 1 on the translated boundary. The
/// argument is expressed in incenter-centered coordinates.
inline double gauge(const ConvexBody& b, std::span<const double> x) {
  if (!b.convex) throw unsupported_error("gauge: requires a convex body");
  if (static_cast<int>(x.size()) != b.dim)
    throw validation_error("gauge: point/body dim mismatch");
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope: {
      const GeometricSummary g = metrics(b);
      const Vec2 c{g.incenter[0], g.incenter[1]};
      const Vec2 p{x[0], x[1]};
      double v = 0.0;
      for (const auto& f : detail::polygon_facets(b.vertices))
        v = std::max(v, dot(f.n, p) / (f.d - dot(f.n, c)));
      return v;
    }
    case BodyKind::ball: {
      double s = 0.0;
      for (int i = 0; i < b.dim; ++i) s += x[i] * x[i];
      return std::sqrt(s) / b.radius;
    }
    case BodyKind::box:
    case BodyKind::slab: {
      const auto w = detail::box_half_widths(b);
      double v = 0.0;
      for (int i = 0; i < b.dim; ++i) v = std::max(v, std::abs(x[i]) / w[i]);
      return v;
    }
    default:
      throw unsupported_error("gauge: unsupported kind");
  }
}

inline double gauge(const ConvexBody& b, Vec2 p) {
  const double xy[2] = {p.x, p.y};
  return gauge(b, std::span<const double>(xy, 2));
}

// ---------------------------------------------------------------------------
// equality certificate and scaling

/// True iff |Omega| = P(Omega) r / N within tol, the scalar identity
/// characterizing bodies homothetic to their form body.
inline bool is_form_homothetic(const ConvexBody& b, double tol = 1e-9) {
  const GeometricSummary g = metrics(b);
  return std::abs(g.volume * b.dim / (g.perimeter * g.inradius) - 1.0) <= tol;
}

inline ConvexBody scale(const ConvexBody& b, double t) {
  if (!(t > 0.0)) throw validation_error("scale: factor must be > 0");
  ConvexBody out = b;
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope:
      for (Vec2& v : out.vertices) v = t * v;
      for (double& c : out.center) c *= t;
      out.radius *= t;
      return out;
    case BodyKind::ball:
      out.radius *= t;
      for (double& c : out.center) c *= t;
      return out;
    case BodyKind::box:
      for (double& w : out.half_widths) w *= t;
      return out;
    case BodyKind::slab: {
      // a scaled slab is a plain box (cross-section thickness t instead of 1)
      ConvexBody box;
      box.kind = BodyKind::box;
      box.dim = b.dim;
      box.half_widths.assign(static_cast<size_t>(b.dim),
                             0.5 * t * b.slab_length);
      box.half_widths.back() = 0.5 * t;
      return box;
    }
    case BodyKind::thin_cone:
      out.cone_scale *= t;
      return out;
    default:
      throw unsupported_error("scale: unsupported for this kind");
  }
}

}  // namespace pqlam
