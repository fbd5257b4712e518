#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tomocor/objective.hpp"

namespace tomocor::fdcheck {

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

/// Five-point central differences on every coordinate, compared with the
/// analytic gradient. The relative error denominator is
/// max(|analytic|, |numeric|, floor_frac * ||analytic||_inf).
inline GradientCheck check_gradient(const ObjectiveFn& phi, std::span<const double> x, double rel_step = 1e-4,
                                    double floor_frac = 1e-6) {
  const ObjectiveReport base = phi(x);
  double gmax = 0.0;
  for (double g : base.gradient) gmax = std::max(gmax, std::abs(g));
  std::vector<double> probe(x.begin(), x.end());
  auto at = [&](std::size_t i, double offset) {
    probe[i] = x[i] + offset;
    const double v = phi(probe).value;
    probe[i] = x[i];
    return v;
  };
  GradientCheck out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    const double fd = (8.0 * (at(i, h) - at(i, -h)) - (at(i, 2 * h) - at(i, -2 * h))) / (12.0 * h);
    const double a = base.gradient[i];
    const double denom = std::max({std::abs(a), std::abs(fd), floor_frac * gmax});
    const double rel = denom > 0.0 ? std::abs(a - fd) / denom : 0.0;
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

}  // namespace tomocor::fdcheck
