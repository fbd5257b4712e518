#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tomocor/objective.hpp"

namespace tomocor {

struct SolverConfig {
  /// Stop once the projected gradient satisfies ||g||_inf <= grad_tol.
  double grad_tol = 1e-5;
  std::size_t max_outer = 500;
  /// PPCG iteration cap per outer iteration.
  std::size_t max_inner = 50;
  /// Inner relative-residual tolerance is min(forcing_cap, sqrt(||g||_inf)).
  double forcing_cap = 0.5;
  double armijo_c = 1e-4;
  /// Scale of the finite-difference step used for Hessian-vector products.
  double fd_step_scale = 1.0;
  std::size_t max_halvings = 40;

  void validate() const;
};

enum class Termination {
  Converged,
  MaxOuter,
  LineSearchFailed,
  NonFiniteStart,
};

const char* to_string(Termination t);

struct IterationRecord {
  std::size_t iter = 0;
  double phi = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t inner_iters = 0;
  double step = 0.0;
  /// Cumulative (function, gradient) evaluations.
  std::size_t fg_evals = 0;
  double wall_ms = 0.0;
  bool steepest_descent = false;
};

struct SolverReport {
  std::vector<IterationRecord> iterates;  // iterates[0] is the starting point
  std::vector<double> x;
  Termination reason = Termination::MaxOuter;
  double phi = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t fg_evals = 0;

  bool converged() const noexcept { return reason == Termination::Converged; }
};

using HessianVecFn = std::function<std::optional<std::vector<double>>(std::span<const double>)>;

struct PpcgResult {
  std::vector<double> direction;
  std::size_t iterations = 0;
  bool steepest_descent = false;
};

/// Preconditioned CG on H d = -grad over the free coordinates (active[i] ==
/// false). Stops on relative residual <= forcing, on the iteration cap, or on
/// non-positive curvature; falls back to preconditioned steepest descent when
/// no descent direction has been built. Active coordinates of the result are 0.
PpcgResult ppcg(const HessianVecFn& hessian_vec, std::span<const double> grad,
                std::span<const double> preconditioner, const std::vector<bool>& active, double forcing,
                std::size_t max_inner);

/// (grad phi(x + t d) - grad phi(x)) / t with
/// t = fd_step_scale * sqrt(eps) * (1 + ||x||_inf) / ||d||_inf. Returns nullopt
/// when the probe is not finite. Throws InvalidParameter for d == 0.
std::optional<std::vector<double>> fd_hessian_vec(const ObjectiveFn& objective, std::span<const double> x,
                                                  std::span<const double> d, std::span<const double> grad_at_x,
                                                  double fd_step_scale = 1.0);

/// Componentwise max(x, lower).
void project_onto_bounds(std::span<double> x, std::span<const double> lower);

struct LineSearchResult {
  bool success = false;
  double alpha = 0.0;
  std::vector<double> x;
  ObjectiveReport report;
  std::size_t probes = 0;
};

/// Backtracking from alpha = 1 by halving along the projected arc P(x + alpha d).
/// Accepts when phi(x_a) <= phi(x) + c * grad^T (x_a - x) and phi(x_a) <= phi(x).
LineSearchResult projected_line_search(std::span<const double> d, std::span<const double> x, double phi_x,
                                       std::span<const double> grad_x, const ObjectiveFn& objective,
                                       std::span<const double> lower, double armijo_c, std::size_t max_halvings);

/// Projected gradient: zero where a coordinate sits on its bound and the
/// gradient points outward.
std::vector<double> projected_gradient(std::span<const double> x, std::span<const double> grad,
                                       std::span<const double> lower);

using IterationObserver = std::function<void(const IterationRecord&, std::span<const double> x)>;

/// Bound-constrained truncated Newton. `lower` holds one bound per coordinate
/// (-infinity for unbounded ones); `preconditioner` is a positive diagonal or
/// empty for identity.
SolverReport tn_minimize(const ObjectiveFn& objective, std::span<const double> x0, std::span<const double> lower,
                         const SolverConfig& cfg, std::span<const double> preconditioner = {},
                         const IterationObserver& observer = {});

/// Lower bounds 0 for the first `image_size` coordinates, -inf for the rest.
std::vector<double> image_lower_bounds(std::size_t image_size, std::size_t dimension);

}  // namespace tomocor
