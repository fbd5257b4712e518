#include "tomocor/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "tomocor/error.hpp"

namespace tomocor {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool finite_report(const ObjectiveReport& r) { return std::isfinite(r.value) && all_finite(r.gradient); }

}  // namespace

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw InvalidParameter("grad_tol must be positive");
  if (max_outer == 0) throw InvalidParameter("max_outer must be positive");
  if (max_inner == 0) throw InvalidParameter("max_inner must be positive");
  if (!(forcing_cap > 0.0 && forcing_cap < 1.0)) throw InvalidParameter("forcing_cap must lie in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidParameter("armijo_c must lie in (0, 1)");
  if (!(fd_step_scale > 0.0)) throw InvalidParameter("fd_step_scale must be positive");
  if (max_halvings == 0) throw InvalidParameter("max_halvings must be positive");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxOuter: return "max-outer";
    case Termination::LineSearchFailed: return "line-search-failed";
    case Termination::NonFiniteStart: return "non-finite-start";
  }
  return "unknown";
}

PpcgResult ppcg(const HessianVecFn& hessian_vec, std::span<const double> grad,
                std::span<const double> preconditioner, const std::vector<bool>& active, double forcing,
                std::size_t max_inner) {
  const std::size_t n = grad.size();
  if (active.size() != n || (!preconditioner.empty() && preconditioner.size() != n)) {
    throw DimensionMismatch("ppcg: argument sizes");
  }
  auto apply_inverse = [&](std::span<const double> r, std::vector<double>& z) {
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = active[i] ? 0.0 : (preconditioner.empty() ? r[i] : r[i] / preconditioner[i]);
    }
  };

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = active[i] ? 0.0 : -grad[i];
  std::vector<double> z(n);
  apply_inverse(r, z);

  PpcgResult out;
  out.direction.assign(n, 0.0);
  const double r0 = std::sqrt(dot(r, r));
  if (r0 == 0.0) return out;

  std::vector<double> p = z;
  double rz = dot(r, z);
  for (std::size_t j = 0; j < max_inner; ++j) {
    auto hp = hessian_vec(p);
    if (!hp) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i]) (*hp)[i] = 0.0;
    }
    const double curvature = dot(p, *hp);
    if (!(curvature > 1e-300 * dot(p, p)) || !std::isfinite(curvature)) break;
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      out.direction[i] += alpha * p[i];
      r[i] -= alpha * (*hp)[i];
    }
    ++out.iterations;
    if (std::sqrt(dot(r, r)) <= forcing * r0) break;
    apply_inverse(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  if (out.iterations == 0) {
    // no curvature information: preconditioned steepest descent
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -grad[i];
    apply_inverse(neg, out.direction);
    out.steepest_descent = true;
  }
  return out;
}

std::optional<std::vector<double>> fd_hessian_vec(const ObjectiveFn& objective, std::span<const double> x,
                                                  std::span<const double> d, std::span<const double> grad_at_x,
                                                  double fd_step_scale) {
  if (d.size() != x.size() || grad_at_x.size() != x.size()) throw DimensionMismatch("fd_hessian_vec: sizes");
  const double dn = inf_norm(d);
  if (dn == 0.0) throw InvalidParameter("fd_hessian_vec: zero direction");
  const double t = fd_step_scale * std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + inf_norm(x)) / dn;
  std::vector<double> probe(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) probe[i] = x[i] + t * d[i];
  ObjectiveReport rep = objective(probe);
  if (!finite_report(rep) || rep.gradient.size() != x.size()) return std::nullopt;
  for (std::size_t i = 0; i < x.size(); ++i) rep.gradient[i] = (rep.gradient[i] - grad_at_x[i]) / t;
  return std::move(rep.gradient);
}

void project_onto_bounds(std::span<double> x, std::span<const double> lower) {
  if (x.size() != lower.size()) throw DimensionMismatch("project_onto_bounds: sizes");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i], lower[i]);
}

LineSearchResult projected_line_search(std::span<const double> d, std::span<const double> x, double phi_x,
                                       std::span<const double> grad_x, const ObjectiveFn& objective,
                                       std::span<const double> lower, double armijo_c, std::size_t max_halvings) {
  const std::size_t n = x.size();
  if (d.size() != n || grad_x.size() != n || lower.size() != n) throw DimensionMismatch("line search: sizes");
  LineSearchResult res;
  std::vector<double> trial(n);
  double alpha = 1.0;
  for (std::size_t h = 0; h <= max_halvings; ++h, alpha *= 0.5) {
    bool moved = false;
    double decrease = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trial[i] = std::max(x[i] + alpha * d[i], lower[i]);
      const double step = trial[i] - x[i];
      moved = moved || step != 0.0;
      decrease += grad_x[i] * step;
    }
    if (!moved) break;
    ObjectiveReport rep = objective(trial);
    ++res.probes;
    if (!finite_report(rep)) continue;
    if (rep.value <= phi_x + armijo_c * decrease && rep.value <= phi_x) {
      res.success = true;
      res.alpha = alpha;
      res.x = trial;
      res.report = std::move(rep);
      return res;
    }
  }
  return res;
}

std::vector<double> projected_gradient(std::span<const double> x, std::span<const double> grad,
                                       std::span<const double> lower) {
  if (grad.size() != x.size() || lower.size() != x.size()) throw DimensionMismatch("projected_gradient: sizes");
  std::vector<double> pg(grad.begin(), grad.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= lower[i] && grad[i] > 0.0) pg[i] = 0.0;
  }
  return pg;
}

std::vector<double> image_lower_bounds(std::size_t image_size, std::size_t dimension) {
  if (image_size > dimension) throw DimensionMismatch("image_lower_bounds: image larger than dimension");
  std::vector<double> lower(dimension, -std::numeric_limits<double>::infinity());
  std::fill_n(lower.begin(), image_size, 0.0);
  return lower;
}

SolverReport tn_minimize(const ObjectiveFn& objective, std::span<const double> x0, std::span<const double> lower,
                         const SolverConfig& cfg, std::span<const double> preconditioner,
                         const IterationObserver& observer) {
  cfg.validate();
  const std::size_t n = x0.size();
  if (lower.size() != n) throw DimensionMismatch("tn_minimize: bounds length");
  if (!preconditioner.empty()) {
    if (preconditioner.size() != n) throw DimensionMismatch("tn_minimize: preconditioner length");
    for (double v : preconditioner) {
      if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("preconditioner must be positive and finite");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  SolverReport out;
  out.x.assign(x0.begin(), x0.end());
  project_onto_bounds(out.x, lower);
  ObjectiveReport cur = objective(out.x);
  out.fg_evals = 1;
  if (!finite_report(cur) || cur.gradient.size() != n) {
    out.reason = Termination::NonFiniteStart;
    out.phi = cur.value;
    out.grad_inf_norm = std::numeric_limits<double>::infinity();
    return out;
  }

  auto record = [&](std::size_t iter, std::size_t inner, double step, bool sd) {
    IterationRecord rec;
    rec.iter = iter;
    rec.phi = cur.value;
    rec.grad_inf_norm = inf_norm(projected_gradient(out.x, cur.gradient, lower));
    rec.inner_iters = inner;
    rec.step = step;
    rec.fg_evals = out.fg_evals;
    rec.wall_ms = elapsed_ms();
    rec.steepest_descent = sd;
    out.iterates.push_back(rec);
    if (observer) observer(rec, out.x);
    return rec.grad_inf_norm;
  };

  double gnorm = record(0, 0, 0.0, false);
  out.reason = Termination::MaxOuter;
  for (std::size_t iter = 1; iter <= cfg.max_outer; ++iter) {
    if (gnorm <= cfg.grad_tol) {
      out.reason = Termination::Converged;
      break;
    }
    std::vector<bool> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = out.x[i] <= lower[i] && cur.gradient[i] > 0.0;

    HessianVecFn hv = [&](std::span<const double> d) -> std::optional<std::vector<double>> {
      ++out.fg_evals;
      return fd_hessian_vec(objective, out.x, d, cur.gradient, cfg.fd_step_scale);
    };
    const double forcing = std::min(cfg.forcing_cap, std::sqrt(gnorm));
    PpcgResult step = ppcg(hv, cur.gradient, preconditioner, active, forcing, cfg.max_inner);

    LineSearchResult ls = projected_line_search(step.direction, out.x, cur.value, cur.gradient, objective, lower,
                                                cfg.armijo_c, cfg.max_halvings);
    out.fg_evals += ls.probes;
    if (!ls.success && !step.steepest_descent) {
      // retry along the preconditioned steepest-descent direction
      PpcgResult sd = ppcg([](std::span<const double>) { return std::optional<std::vector<double>>{}; },
                           cur.gradient, preconditioner, active, forcing, 1);
      ls = projected_line_search(sd.direction, out.x, cur.value, cur.gradient, objective, lower, cfg.armijo_c,
                                 cfg.max_halvings);
      out.fg_evals += ls.probes;
      step.steepest_descent = true;
    }
    if (!ls.success) {
      out.reason = Termination::LineSearchFailed;
      break;
    }
    out.x = std::move(ls.x);
    cur = std::move(ls.report);
    gnorm = record(iter, step.iterations, ls.alpha, step.steepest_descent);
    if (iter == cfg.max_outer && gnorm <= cfg.grad_tol) out.reason = Termination::Converged;
  }
  out.phi = cur.value;
  out.grad_inf_norm = gnorm;
  return out;
}

}  // namespace tomocor
