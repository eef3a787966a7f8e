#pragma once

// Poincare-Sobolev constants: the one-dimensional constants pi_{p,q}, grid
// solvers for lambda_{p,q} on planar domains, the radial solver on balls,
// the sharp product constant K_{p,q,N}, the thin-cone limit value and the
// gauge-transplant competitor bound.
//
// All minimizations run one engine: spectral projected gradient descent
// (Barzilai-Borwein steps, nonmonotone Armijo backtracking) on the
// scale-invariant Rayleigh quotient, with iterates kept nonnegative and
// q-renormalized after every step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pqlam/geometry.hpp"
#include "pqlam/special.hpp"

namespace pqlam {

struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exponents of the embedding W^{1,p}_0 -> L^q: 1 <= q < p, or 1 < q = p.
struct ExponentPair {
  double p = 2.0;
  double q = 2.0;

  ExponentPair() = default;
  ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(q >= 1.0) || !(p >= q) || !std::isfinite(p))
      throw validation_error("ExponentPair: requires 1 <= q <= p < inf");
    if (p == q && !(q > 1.0))
      throw validation_error("ExponentPair: q = p requires p > 1");
  }

  bool conformal() const { return p == q; }
  /// beta = pq/(p-q); infinity when p = q.
  double beta() const {
    return p == q ? std::numeric_limits<double>::infinity() : p * q / (p - q);
  }
  double conjugate() const { return p / (p - 1.0); }
};

enum class LambdaMethod { fd_rayleigh, linear_eigen, poisson_torsion, radial_1d };
enum class BoundKind { approximation, upper_bound_by_competitor };

inline const char* to_string(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::fd_rayleigh: return "fd-rayleigh";
    case LambdaMethod::linear_eigen: return "linear-eigen";
    case LambdaMethod::poisson_torsion: return "poisson-torsion";
    case LambdaMethod::radial_1d: return "radial-1d";
  }
  return "?";
}

inline const char* to_string(BoundKind b) {
  return b == BoundKind::approximation ? "approximation"
                                       : "upper-bound-by-competitor";
}

struct SobolevEstimate {
  ExponentPair pair;
  double value = 0.0;
  double mesh_h = 0.0;
  long iterations = 0;
  double residual = 0.0;
  LambdaMethod method = LambdaMethod::fd_rayleigh;
  BoundKind bound_kind = BoundKind::approximation;
};

/// Solver knobs with their documented defaults. Every report header carries
/// these values for provenance.
struct SolverConfig {
  double mesh_h = 1.0 / 128;
  int gridpoints = 2048;
  long max_iterations = 200000;
  int stall_window = 50;       // quotient-change window for stopping
  double rel_change_tol = 1e-9;
  double delta_coeff = 1e-8;   // gradient smoothing for p < 2
  double solver_rel_tol = 0.03;  // relative accuracy budget for verdicts
  double cg_tol = 1e-10;
  long cg_max_iterations = 50000;
  int jobs = 1;
};

/// lambda(t Omega) = t^exponent lambda(Omega).
inline double lambda_scaling_exponent(const ExponentPair& pr, int dim) {
  return -pr.p + dim * (1.0 - pr.p / pr.q);
}

// ---------------------------------------------------------------------------
// spectral projected gradient driver

namespace detail {

inline double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct SpgOutcome {
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Problem interface: p, q, energy_grad(u, g), qnorm_pow(u, g), enforce(u),
// set_delta(d), delta_scale(u). The quotient minimized is
// R(u) = energy / qnorm_pow^{p/q}; R is 0-homogeneous, so renormalization is
// numerical hygiene rather than a constraint.
template <class Problem>
SpgOutcome spg_minimize(Problem& prob, std::vector<double>& u,
                        const SolverConfig& cfg) {
  const size_t n = u.size();
  const double pq = prob.p / prob.q;
  std::vector<double> g(n), gE(n), gN(n), trial(n), gnew(n);

  auto normalize = [&](std::vector<double>& v) {
    const double np = prob.qnorm_pow(v, nullptr);
    if (!(np > 0.0))
      throw convergence_error("spg: iterate collapsed to zero norm");
    const double s = std::pow(np, -1.0 / prob.q);
    for (double& x : v) x *= s;
  };
  auto eval = [&](const std::vector<double>& v, std::vector<double>* grad) {
    const double E = prob.energy_grad(v, grad ? &gE : nullptr);
    const double np = prob.qnorm_pow(v, grad ? &gN : nullptr);
    const double denom = std::pow(np, pq);
    if (grad) {
      const double c = pq * E / np;
      for (size_t i = 0; i < n; ++i) (*grad)[i] = (gE[i] - c * gN[i]) / denom;
    }
    return E / denom;
  };

  prob.enforce(u);
  normalize(u);
  double quot = eval(u, &g);
  double gnorm2 = dot_v(g, g);
  double alpha = 1.0;
  {
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    if (gmax > 0.0) alpha = 1.0 / gmax;
  }

  std::deque<double> armijo_hist{quot};
  std::deque<double> window{quot};
  SpgOutcome out;
  int stalled = 0;
  long it = 0;
  bool annealed = prob.p >= 2.0;  // delta annealing only applies below p = 2

  for (; it < cfg.max_iterations; ++it) {
    double ref = *std::max_element(armijo_hist.begin(), armijo_hist.end());
    bool accepted = false;
    double qtrial = 0.0;
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      for (size_t i = 0; i < n; ++i) trial[i] = u[i] - step * alpha * g[i];
      prob.enforce(trial);
      normalize(trial);
      qtrial = eval(trial, nullptr);
      if (qtrial <= ref - 1e-4 * step * alpha * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      alpha *= 0.1;
      if (++stalled >= 8) break;  // quotient is flat at this scale
      continue;
    }
    stalled = 0;

    const double qnew = eval(trial, &gnew);
    double ss = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double sk = trial[i] - u[i];
      ss += sk * sk;
      sy += sk * (gnew[i] - g[i]);
    }
    alpha = (sy > 1e-300) ? std::clamp(ss / sy, 1e-14, 1e14) : alpha * 2.0;

    u.swap(trial);
    g.swap(gnew);
    quot = qnew;
    gnorm2 = dot_v(g, g);

    armijo_hist.push_back(quot);
    if (armijo_hist.size() > 10) armijo_hist.pop_front();
    window.push_back(quot);
    if (static_cast<int>(window.size()) > cfg.stall_window) window.pop_front();

    if (static_cast<int>(window.size()) == cfg.stall_window) {
      const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
      const double spread = *hi - *lo;
      if (spread <= cfg.rel_change_tol * std::max(std::abs(quot), 1e-300)) {
        if (!annealed) {
          // one smoothing anneal near convergence, then re-converge
          annealed = true;
          prob.set_delta(prob.delta() / 100.0);
          quot = eval(u, &g);
          gnorm2 = dot_v(g, g);
          window.clear();
          window.push_back(quot);
          continue;
        }
        out.converged = true;
        out.residual = spread / std::max(std::abs(quot), 1e-300);
        break;
      }
      out.residual = spread / std::max(std::abs(quot), 1e-300);
    }
  }
  out.iterations = it;
  if (!out.converged) {
    if (out.residual <= 1e3 * cfg.rel_change_tol) {
      out.converged = true;  // flat to well below reporting accuracy
    } else {
      throw convergence_error(
          "spg: no convergence after " + std::to_string(it) +
          " iterations (relative quotient spread " +
          std::to_string(out.residual) + ")");
    }
  }
  out.value = quot;
  return out;
}

// ---------------------------------------------------------------------------
// 1D problems (interval and radial)

struct Line1DProblem {
  double p, q;
  double h;
  int cells;                    // nodes = cells + 1
  std::vector<double> cell_w;   // energy weight per cell (already * h)
  std::vector<double> node_w;   // norm weight per node (already * h)
  bool pin_left = true;
  double delta_ = 0.0;

  double delta() const { return delta_; }
  void set_delta(double d) { delta_ = d; }

  void enforce(std::vector<double>& u) const {
    if (pin_left) u.front() = 0.0;
    u.back() = 0.0;
    for (double& x : u) x = std::max(x, 0.0);
  }

  double energy_grad(const std::vector<double>& u,
                     std::vector<double>* g) const {
    if (g) std::fill(g->begin(), g->end(), 0.0);
    double E = 0.0;
    const double d2 = delta_ * delta_;
    for (int c = 0; c < cells; ++c) {
      const double du = (u[c + 1] - u[c]) / h;
      const double s = du * du + d2;
      if (s <= 0.0) continue;
      E += std::pow(s, 0.5 * p) * cell_w[c];
      if (g) {
        const double w = p * std::pow(s, 0.5 * p - 1.0) * du * cell_w[c] / h;
        (*g)[c + 1] += w;
        (*g)[c] -= w;
      }
    }
    if (g) {
      if (pin_left) (*g)[0] = 0.0;
      (*g)[cells] = 0.0;
    }
    return E;
  }

  double qnorm_pow(const std::vector<double>& u,
                   std::vector<double>* g) const {
    if (g) std::fill(g->begin(), g->end(), 0.0);
    double np = 0.0;
    for (int i = 0; i <= cells; ++i) {
      if (node_w[i] == 0.0) continue;
      const double a = std::abs(u[i]);
      np += std::pow(a, q) * node_w[i];
      if (g && a > 0.0)
        (*g)[i] = q * std::pow(a, q - 1.0) * (u[i] > 0 ? 1.0 : -1.0) * node_w[i];
    }
    return np;
  }
};

inline Line1DProblem make_interval_problem(const ExponentPair& pr, int cells) {
  Line1DProblem prob;
  prob.p = pr.p;
  prob.q = pr.q;
  prob.cells = cells;
  prob.h = 1.0 / cells;
  prob.cell_w.assign(cells, prob.h);
  prob.node_w.assign(cells + 1, prob.h);
  prob.node_w.front() = prob.node_w.back() = 0.0;
  prob.pin_left = true;
  return prob;
}

inline Line1DProblem make_radial_problem(const ExponentPair& pr, int dim,
                                         int cells) {
  Line1DProblem prob;
  prob.p = pr.p;
  prob.q = pr.q;
  prob.cells = cells;
  prob.h = 1.0 / cells;
  prob.pin_left = false;  // f'(0) = 0 is natural, f(1) = 0 pinned
  const double area = unit_sphere_area(dim);
  prob.cell_w.resize(cells);
  prob.node_w.resize(cells + 1);
  for (int c = 0; c < cells; ++c) {
    const double mid = (c + 0.5) * prob.h;
    prob.cell_w[c] = area * std::pow(mid, dim - 1) * prob.h;
  }
  for (int i = 0; i <= cells; ++i)
    prob.node_w[i] = area * std::pow(i * prob.h, dim - 1) * prob.h;
  prob.node_w.back() = 0.0;
  return prob;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// one-dimensional constants

/// pi_{p,q}: the best constant ||u'||_p / ||u||_q over zero-trace profiles on
/// (0,1), minimized over grid functions. Returns the norm ratio (so that
/// pi^p is the interval lambda).
inline double pi_pq(const ExponentPair& pr, int gridpoints = 2048,
                    const SolverConfig& cfg = {}) {
  if (gridpoints < 64) throw validation_error("pi_pq: gridpoints must be >= 64");
  auto prob = detail::make_interval_problem(pr, gridpoints);
  std::vector<double> u(gridpoints + 1);
  for (int i = 0; i <= gridpoints; ++i) {
    const double x = static_cast<double>(i) / gridpoints;
    u[i] = std::min(x, 1.0 - x);
  }
  if (pr.p < 2.0) prob.set_delta(cfg.delta_coeff / prob.h);
  const auto out = detail::spg_minimize(prob, u, cfg);
  return std::pow(out.value, 1.0 / pr.p);
}

/// Closed form available for q = 1: pi_{p,1}^p = 2^p (p' + 1)^{p-1}.
inline std::optional<double> pi_special(const ExponentPair& pr) {
  if (pr.q == 1.0)
    return 2.0 * std::pow(pr.conjugate() + 1.0, (pr.p - 1.0) / pr.p);
  return std::nullopt;
}

/// lim_{p -> inf} pi_{p,q} = 2 (q+1)^{1/q}.
inline double limit_pi(double q) {
  if (!(q >= 1.0)) throw validation_error("limit_pi: q >= 1");
  return 2.0 * std::pow(q + 1.0, 1.0 / q);
}

namespace detail {

/// pi_{p,q} with the closed form when available, else the grid solver
/// (memoized; identical inputs always return the identical double).
inline double resolve_pi(const ExponentPair& pr, int gridpoints,
                         const SolverConfig& cfg) {
  if (auto s = pi_special(pr)) return *s;
  static std::map<std::tuple<double, double, int>, double> cache;
  static std::mutex mtx;
  const auto key = std::make_tuple(pr.p, pr.q, gridpoints);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double v = pi_pq(pr, gridpoints, cfg);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, v).first->second;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// radial solver on balls

struct RadialSolution {
  SobolevEstimate estimate;
  std::vector<double> profile;  // optimal f on the uniform grid of [0,1]
};

/// lambda_{p,q}(B_1) in R^dim via the weighted radial Rayleigh quotient over
/// profiles with f(1) = 0 and natural f'(0) = 0.
inline RadialSolution lambda_ball_profile(int dim, const ExponentPair& pr,
                                          int gridpoints = 2048,
                                          const SolverConfig& cfg = {}) {
  if (dim < 2) throw validation_error("lambda_ball: dim must be >= 2");
  if (gridpoints < 64)
    throw validation_error("lambda_ball: gridpoints must be >= 64");
  auto prob = detail::make_radial_problem(pr, dim, gridpoints);
  std::vector<double> f(gridpoints + 1);
  for (int i = 0; i <= gridpoints; ++i)
    f[i] = 1.0 - static_cast<double>(i) / gridpoints;
  if (pr.p < 2.0) prob.set_delta(cfg.delta_coeff / prob.h);
  const auto out = detail::spg_minimize(prob, f, cfg);
  RadialSolution sol;
  sol.estimate = SobolevEstimate{pr,
                                 out.value,
                                 prob.h,
                                 out.iterations,
                                 out.residual,
                                 LambdaMethod::radial_1d,
                                 BoundKind::approximation};
  sol.profile = std::move(f);
  return sol;
}

inline SobolevEstimate lambda_ball(int dim, const ExponentPair& pr,
                                   int gridpoints = 2048,
                                   const SolverConfig& cfg = {}) {
  return lambda_ball_profile(dim, pr, gridpoints, cfg).estimate;
}

/// Memoized lambda_{p,q}(B_1); the harness evaluates the same right-hand
/// sides for many bodies.
inline double lambda_ball_cached(int dim, const ExponentPair& pr,
                                 int gridpoints = 2048,
                                 const SolverConfig& cfg = {}) {
  static std::map<std::tuple<int, double, double, int>, double> cache;
  static std::mutex mtx;
  const auto key = std::make_tuple(dim, pr.p, pr.q, gridpoints);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double v = lambda_ball(dim, pr, gridpoints, cfg).value;
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, v).first->second;
}

// ---------------------------------------------------------------------------
// planar grid solver

namespace detail {

struct Grid2D {
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  int nx = 0, ny = 0;  // cell counts; nodes are (nx+1) x (ny+1)
  std::vector<uint8_t> interior;
  std::vector<double> dist;  // boundary distance at nodes (init profile)
  long interior_count = 0;

  size_t idx(int i, int j) const {
    return static_cast<size_t>(j) * (nx + 1) + i;
  }
  size_t size() const {
    return static_cast<size_t>(nx + 1) * static_cast<size_t>(ny + 1);
  }
};

inline void body_bbox(const ConvexBody& b, double& x0, double& x1, double& y0,
                      double& y1) {
  switch (b.kind) {
    case BodyKind::polygon:
    case BodyKind::tangent_polytope:
    case BodyKind::perturbed_ball: {
      x0 = y0 = std::numeric_limits<double>::infinity();
      x1 = y1 = -x0;
      for (const Vec2& v : b.vertices) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
      }
      return;
    }
    case BodyKind::ball:
      x0 = b.center[0] - b.radius;
      x1 = b.center[0] + b.radius;
      y0 = b.center[1] - b.radius;
      y1 = b.center[1] + b.radius;
      return;
    case BodyKind::box:
      x0 = -b.half_widths[0];
      x1 = b.half_widths[0];
      y0 = -b.half_widths[1];
      y1 = b.half_widths[1];
      return;
    case BodyKind::slab:
      x0 = -0.5 * b.slab_length;
      x1 = 0.5 * b.slab_length;
      y0 = 0.0;
      y1 = 1.0;
      return;
    case BodyKind::slit_square:
      x0 = 0.0;
      x1 = 1.0;
      y0 = 0.0;
      y1 = 1.0;
      return;
    default:
      throw unsupported_error("lambda_2d: body is not planar");
  }
}

inline Grid2D make_grid(const ConvexBody& b, double h) {
  if (b.dim != 2) throw unsupported_error("lambda_2d: body must be planar");
  if (!(h > 0.0)) throw validation_error("lambda_2d: mesh_h must be > 0");
  if (b.kind == BodyKind::slit_square && h > 1.0 / (4.0 * b.slit_count) + 1e-15)
    throw validation_error(
        "lambda_2d: slit square needs mesh_h <= 1/(4n) to resolve slits");
  double x0, x1, y0, y1;
  body_bbox(b, x0, x1, y0, y1);
  Grid2D g;
  g.h = h;
  g.x0 = x0;
  g.y0 = y0;
  g.nx = static_cast<int>(std::ceil((x1 - x0) / h - 1e-9));
  g.ny = static_cast<int>(std::ceil((y1 - y0) / h - 1e-9));
  if (g.nx < 2 || g.ny < 2)
    throw validation_error("lambda_2d: mesh too coarse for the bounding box");
  g.interior.assign(g.size(), 0);
  g.dist.assign(g.size(), 0.0);

  const bool slit = b.kind == BodyKind::slit_square;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const Vec2 p{x0 + i * h, y0 + j * h};
      double d;
      if (slit) {
        const double box =
            std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
        if (box <= 1e-12) continue;
        // Dirichlet-pin nodes within half a cell of a slit segment
        const double ds = [&] {
          double best = std::numeric_limits<double>::infinity();
          const double ytop = 1.0 - 1.0 / b.slit_count;
          for (int s = 1; s < b.slit_count; ++s) {
            const double dx = p.x - static_cast<double>(s) / b.slit_count;
            const double dy = p.y > ytop ? p.y - ytop : 0.0;
            best = std::min(best, std::hypot(dx, dy));
          }
          return best;
        }();
        if (ds <= 0.5 * h) continue;
        d = std::min(box, ds);
      } else {
        d = distance_to_boundary(b, p);
        if (d <= 1e-12) continue;
      }
      g.interior[g.idx(i, j)] = 1;
      g.dist[g.idx(i, j)] = d;
      ++g.interior_count;
    }
  return g;
}

struct Grid2DProblem {
  const Grid2D* grid = nullptr;
  double p = 2.0, q = 2.0;
  double delta_ = 0.0;

  double delta() const { return delta_; }
  void set_delta(double d) { delta_ = d; }

  void enforce(std::vector<double>& u) const {
    for (size_t i = 0; i < u.size(); ++i) {
      if (!grid->interior[i])
        u[i] = 0.0;
      else
        u[i] = std::max(u[i], 0.0);
    }
  }

  double energy_grad(const std::vector<double>& u,
                     std::vector<double>* g) const {
    if (g) std::fill(g->begin(), g->end(), 0.0);
    const Grid2D& gr = *grid;
    const double h = gr.h;
    const double area = h * h;
    const double d2 = delta_ * delta_;
    double E = 0.0;
    for (int j = 0; j < gr.ny; ++j) {
      const size_t row = gr.idx(0, j);
      for (int i = 0; i < gr.nx; ++i) {
        const size_t c = row + i;
        const size_t e = c + 1;
        const size_t n = c + gr.nx + 1;
        const double ux = (u[e] - u[c]) / h;
        const double uy = (u[n] - u[c]) / h;
        const double s = ux * ux + uy * uy + d2;
        if (s <= 0.0) continue;
        E += std::pow(s, 0.5 * p) * area;
        if (g) {
          const double w = p * std::pow(s, 0.5 * p - 1.0) * h;  // area / h
          (*g)[e] += w * ux;
          (*g)[n] += w * uy;
          (*g)[c] -= w * (ux + uy);
        }
      }
    }
    if (g)
      for (size_t i = 0; i < u.size(); ++i)
        if (!gr.interior[i]) (*g)[i] = 0.0;
    return E;
  }

  double qnorm_pow(const std::vector<double>& u,
                   std::vector<double>* g) const {
    if (g) std::fill(g->begin(), g->end(), 0.0);
    const Grid2D& gr = *grid;
    const double area = gr.h * gr.h;
    double np = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      if (!gr.interior[i]) continue;
      const double a = std::abs(u[i]);
      if (a == 0.0) continue;
      np += std::pow(a, q) * area;
      if (g) (*g)[i] = q * std::pow(a, q - 1.0) * (u[i] > 0 ? 1.0 : -1.0) * area;
    }
    return np;
  }
};

// 5-point graph Laplacian restricted to interior nodes (exterior = 0).
inline void apply_graph_laplacian(const Grid2D& g, const std::vector<double>& u,
                                  std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const size_t c = g.idx(i, j);
      if (!g.interior[c]) continue;
      double acc = 4.0 * u[c];
      if (i > 0 && g.interior[c - 1]) acc -= u[c - 1];
      if (i < g.nx && g.interior[c + 1]) acc -= u[c + 1];
      if (j > 0 && g.interior[c - (g.nx + 1)]) acc -= u[c - (g.nx + 1)];
      if (j < g.ny && g.interior[c + (g.nx + 1)]) acc -= u[c + (g.nx + 1)];
      out[c] = acc;
    }
}

struct CgOutcome {
  long iterations = 0;
  double residual = 0.0;
};

inline CgOutcome cg_solve(const Grid2D& g, const std::vector<double>& rhs,
                          std::vector<double>& x, double tol, long max_it) {
  const size_t n = rhs.size();
  std::vector<double> r(n), pdir(n), ap(n);
  apply_graph_laplacian(g, x, ap);
  for (size_t i = 0; i < n; ++i) r[i] = g.interior[i] ? rhs[i] - ap[i] : 0.0;
  pdir = r;
  double rr = dot_v(r, r);
  const double b2 = std::max(dot_v(rhs, rhs), 1e-300);
  CgOutcome out;
  while (out.iterations < max_it && rr > tol * tol * b2) {
    apply_graph_laplacian(g, pdir, ap);
    const double alpha = rr / std::max(dot_v(pdir, ap), 1e-300);
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * pdir[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot_v(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (size_t i = 0; i < n; ++i) pdir[i] = r[i] + beta * pdir[i];
    ++out.iterations;
  }
  out.residual = std::sqrt(rr / b2);
  return out;
}

}  // namespace detail

/// lambda_{p,q} on a planar body through the masked uniform grid. Gradient
/// descent on the Rayleigh quotient always runs; the symmetric eigenproblem
/// (p = q = 2, inverse power iteration) and the torsion route (p = 2, q = 1,
/// one Poisson solve) cross-check where applicable, and the smallest
/// converged value wins.
inline SobolevEstimate lambda_2d(const ConvexBody& body, const ExponentPair& pr,
                                 double mesh_h,
                                 const SolverConfig& cfg = {}) {
  const detail::Grid2D grid = detail::make_grid(body, mesh_h);
  const GeometricSummary gs = metrics(body);
  if (gs.inradius / mesh_h < 4.0)
    throw validation_error(
        "lambda_2d: mesh too coarse (< 8 interior nodes across the inradius)");
  if (grid.interior_count < 16)
    throw validation_error("lambda_2d: mesh too coarse (almost no interior)");

  detail::Grid2DProblem prob;
  prob.grid = &grid;
  prob.p = pr.p;
  prob.q = pr.q;
  std::vector<double> u = grid.dist;
  if (pr.p < 2.0) {
    double scale = 0.0;
    for (double v : u) scale = std::max(scale, v);
    prob.set_delta(cfg.delta_coeff * scale / mesh_h);
  }
  const auto spg = detail::spg_minimize(prob, u, cfg);
  SobolevEstimate best{pr,
                       spg.value,
                       mesh_h,
                       spg.iterations,
                       spg.residual,
                       LambdaMethod::fd_rayleigh,
                       BoundKind::approximation};

  if (pr.p == 2.0 && pr.q == 2.0) {
    // inverse power iteration on the five-point Laplacian
    std::vector<double> x = grid.dist, y(grid.size(), 0.0), ax(grid.size());
    double nrm = std::sqrt(detail::dot_v(x, x));
    for (double& v : x) v /= nrm;
    double mu = 0.0;
    long its = 0;
    double res = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::fill(y.begin(), y.end(), 0.0);
      const auto cg = detail::cg_solve(grid, x, y, cfg.cg_tol,
                                       cfg.cg_max_iterations);
      its += cg.iterations;
      nrm = std::sqrt(detail::dot_v(y, y));
      for (double& v : y) v /= nrm;
      detail::apply_graph_laplacian(grid, y, ax);
      const double mu_new = detail::dot_v(y, ax);
      res = std::abs(mu_new - mu) / std::max(mu_new, 1e-300);
      mu = mu_new;
      x = y;
      if (res < 1e-12) break;
    }
    const double lam = mu / (mesh_h * mesh_h);
    if (lam < best.value)
      best = SobolevEstimate{pr,    lam, mesh_h, its, res,
                             LambdaMethod::linear_eigen,
                             BoundKind::approximation};
  }

  if (pr.p == 2.0 && pr.q == 1.0) {
    // torsion route: -Lap w = 1, lambda = 1 / int w
    std::vector<double> rhs(grid.size(), 0.0), w(grid.size(), 0.0);
    for (size_t i = 0; i < rhs.size(); ++i)
      if (grid.interior[i]) rhs[i] = mesh_h * mesh_h;
    const auto cg = detail::cg_solve(grid, rhs, w, cfg.cg_tol,
                                     cfg.cg_max_iterations);
    double torsion = 0.0;
    for (size_t i = 0; i < w.size(); ++i)
      if (grid.interior[i]) torsion += w[i];
    torsion *= mesh_h * mesh_h;
    const double lam = 1.0 / torsion;
    if (lam < best.value)
      best = SobolevEstimate{pr,  lam, mesh_h, cg.iterations, cg.residual,
                             LambdaMethod::poisson_torsion,
                             BoundKind::approximation};
  }
  return best;
}

// ---------------------------------------------------------------------------
// sharp constants

/// K_{p,q,N} = (pi_{p,q} / 2N)^p prod_{j=2}^N (pq/(j(p-q)) + 1)^{p/q - 1}.
inline double K_constant(const ExponentPair& pr, int dim,
                         double pi_value = std::numeric_limits<double>::quiet_NaN(),
                         int gridpoints = 2048, const SolverConfig& cfg = {}) {
  if (!(pr.q < pr.p))
    throw validation_error(
        "K_constant: requires q < p (use the conformal limit for q = p)");
  if (dim < 2) throw validation_error("K_constant: dim must be >= 2");
  const double pi =
      std::isnan(pi_value) ? detail::resolve_pi(pr, gridpoints, cfg) : pi_value;
  const double beta = pr.beta();
  double prod = 1.0;
  for (int j = 2; j <= dim; ++j)
    prod *= std::pow(beta / j + 1.0, pr.p / pr.q - 1.0);
  return std::pow(pi / (2.0 * dim), pr.p) * prod;
}

/// Conformal-limit constant (pi_p / 2N)^p for q = p.
inline double K_constant_conformal(double p, int dim, double pi_p) {
  return std::pow(pi_p / (2.0 * dim), p);
}

/// int over the unit (N-1)-ball of (1 - |x|)^power.
inline double cone_base_integral(int dim, double power) {
  if (dim < 2) throw validation_error("cone_base_integral: dim >= 2");
  const int m = dim - 1;
  return m * unit_ball_volume(m) * beta_function(m, power + 1.0);
}

/// Limit of the shape functional along the thin cones over the unit
/// (N-1)-ball with height profile 1 - |x|; coincides with K_{p,q,N}.
inline double cone_thin_limit(const ExponentPair& pr, int dim,
                              double pi_value = std::numeric_limits<double>::quiet_NaN(),
                              int gridpoints = 2048,
                              const SolverConfig& cfg = {}) {
  if (!(pr.q < pr.p))
    throw validation_error("cone_thin_limit: requires q < p");
  if (dim < 2) throw validation_error("cone_thin_limit: dim must be >= 2");
  const double pi =
      std::isnan(pi_value) ? detail::resolve_pi(pr, gridpoints, cfg) : pi_value;
  const double beta = pr.beta();
  const double wn1 = unit_ball_volume(dim - 1);
  const double i1 = cone_base_integral(dim, 1.0);
  const double i2 = cone_base_integral(dim, beta + 1.0);
  const double pq = pr.p / pr.q;
  return std::pow(pi / (2.0 * wn1), pr.p) * std::pow(i1, pr.p - 1.0 + pq) /
         std::pow(i2, pq - 1.0);
}

// ---------------------------------------------------------------------------
// gauge competitor

struct GaugeCompetitor {
  SobolevEstimate competitor;     // quotient of f(j(x)) on the grid
  double closed_form_bound = 0.0; // omega^{(p-q)/q} lambda(B_1) / (|O|^{(p-q)/q} r^p)
};

/// Transplants the radial ball minimizer through the Minkowski gauge and
/// evaluates its Rayleigh quotient; also reports the closed-form bound it
/// realises. The competitor value is an upper bound for lambda up to
/// discretization error.
inline GaugeCompetitor gauge_competitor(const ConvexBody& body,
                                        const ExponentPair& pr, double mesh_h,
                                        const SolverConfig& cfg = {}) {
  if (!body.convex)
    throw unsupported_error("gauge_competitor: requires a convex body");
  if (body.dim != 2)
    throw unsupported_error("gauge_competitor: planar bodies only");
  const RadialSolution radial =
      lambda_ball_profile(2, pr, cfg.gridpoints, cfg);
  const std::vector<double>& f = radial.profile;
  const int m = static_cast<int>(f.size()) - 1;

  const detail::Grid2D grid = detail::make_grid(body, mesh_h);
  const GeometricSummary gs = metrics(body);
  const Vec2 c{gs.incenter[0], gs.incenter[1]};
  std::vector<double> u(grid.size(), 0.0);
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) {
      const size_t id = grid.idx(i, j);
      if (!grid.interior[id]) continue;
      const Vec2 p{grid.x0 + i * grid.h - c.x, grid.y0 + j * grid.h - c.y};
      const double t = std::min(gauge(body, p), 1.0);
      const double s = t * m;
      const int k = std::min(static_cast<int>(s), m - 1);
      const double frac = s - k;
      u[id] = (1.0 - frac) * f[k] + frac * f[k + 1];
    }
  detail::Grid2DProblem prob;
  prob.grid = &grid;
  prob.p = pr.p;
  prob.q = pr.q;
  const double energy = prob.energy_grad(u, nullptr);
  const double np = prob.qnorm_pow(u, nullptr);
  GaugeCompetitor out;
  out.competitor = SobolevEstimate{pr,
                                   energy / std::pow(np, pr.p / pr.q),
                                   mesh_h,
                                   radial.estimate.iterations,
                                   radial.estimate.residual,
                                   LambdaMethod::fd_rayleigh,
                                   BoundKind::upper_bound_by_competitor};
  out.closed_form_bound = std::pow(unit_ball_volume(2), (pr.p - pr.q) / pr.q) *
                          radial.estimate.value /
                          (std::pow(gs.volume, (pr.p - pr.q) / pr.q) *
                           std::pow(gs.inradius, pr.p));
  return out;
}

}  // namespace pqlam
