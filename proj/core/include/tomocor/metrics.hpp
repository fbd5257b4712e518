#pragma once

#include <cstddef>

#include "tomocor/image.hpp"
#include "tomocor/projector.hpp"

namespace tomocor {

struct SsimConstants {
  double c1 = 1e-4;
  double c2 = 9e-4;
  double dynamic_range = 1.0;

  /// c1 = (0.01 R)^2, c2 = (0.03 R)^2 with R = max - min of the reference
  /// (R = 1 for a constant reference).
  static SsimConstants for_reference(const Image& reference);
  static SsimConstants for_range(double dynamic_range);
};

/// Single-window SSIM using global means, variances and covariance.
double ssim(const Image& a, const Image& b, const SsimConstants& consts);
/// Convenience overload with constants derived from `a`.
double ssim(const Image& a, const Image& b);

/// Mean SSIM over a sliding square window of side `window` (valid positions only).
double ssim_windowed(const Image& a, const Image& b, const SsimConstants& consts, std::size_t window = 7);

struct Misfit {
  double value = 0.0;
  /// Set when ||s2|| == 0; value is then +infinity.
  bool degenerate_reference = false;
};

/// ||s1 - s2||_F / ||s2||_F
Misfit rel_misfit(const Sinogram& s1, const Sinogram& s2);

}  // namespace tomocor
