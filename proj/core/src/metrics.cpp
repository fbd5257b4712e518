#include "tomocor/metrics.hpp"

#include <cmath>
#include <limits>

#include "tomocor/error.hpp"

namespace tomocor {

namespace {

struct Moments {
  double mean_a = 0.0, mean_b = 0.0, var_a = 0.0, var_b = 0.0, cov = 0.0;
};

// population moments over the window [r0, r0+h) x [c0, c0+w)
Moments moments(const Image& a, const Image& b, std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) {
  Moments m;
  const double count = static_cast<double>(h * w);
  for (std::size_t r = r0; r < r0 + h; ++r) {
    for (std::size_t c = c0; c < c0 + w; ++c) {
      m.mean_a += a(r, c);
      m.mean_b += b(r, c);
    }
  }
  m.mean_a /= count;
  m.mean_b /= count;
  for (std::size_t r = r0; r < r0 + h; ++r) {
    for (std::size_t c = c0; c < c0 + w; ++c) {
      const double da = a(r, c) - m.mean_a;
      const double db = b(r, c) - m.mean_b;
      m.var_a += da * da;
      m.var_b += db * db;
      m.cov += da * db;
    }
  }
  m.var_a /= count;
  m.var_b /= count;
  m.cov /= count;
  return m;
}

double ssim_from(const Moments& m, const SsimConstants& k) {
  return ((2.0 * m.mean_a * m.mean_b + k.c1) * (2.0 * m.cov + k.c2)) /
         ((m.mean_a * m.mean_a + m.mean_b * m.mean_b + k.c1) * (m.var_a + m.var_b + k.c2));
}

void check_pair(const Image& a, const Image& b) {
  if (a.n() != b.n() || a.n() == 0) throw DimensionMismatch("ssim: images must be non-empty and the same size");
}

}  // namespace

SsimConstants SsimConstants::for_range(double dynamic_range) {
  if (!(dynamic_range > 0.0) || !std::isfinite(dynamic_range)) {
    throw InvalidParameter("SSIM dynamic range must be positive");
  }
  SsimConstants k;
  k.dynamic_range = dynamic_range;
  k.c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  k.c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  return k;
}

SsimConstants SsimConstants::for_reference(const Image& reference) {
  const double range = reference.max() - reference.min();
  return for_range(range > 0.0 ? range : 1.0);
}

double ssim(const Image& a, const Image& b, const SsimConstants& consts) {
  check_pair(a, b);
  return ssim_from(moments(a, b, 0, 0, a.n(), a.n()), consts);
}

double ssim(const Image& a, const Image& b) { return ssim(a, b, SsimConstants::for_reference(a)); }

double ssim_windowed(const Image& a, const Image& b, const SsimConstants& consts, std::size_t window) {
  check_pair(a, b);
  if (window == 0 || window > a.n()) throw InvalidParameter("ssim window must lie in [1, n]");
  const std::size_t positions = a.n() - window + 1;
  double total = 0.0;
  for (std::size_t r = 0; r < positions; ++r) {
    for (std::size_t c = 0; c < positions; ++c) total += ssim_from(moments(a, b, r, c, window, window), consts);
  }
  return total / static_cast<double>(positions * positions);
}

Misfit rel_misfit(const Sinogram& s1, const Sinogram& s2) {
  if (s1.n_angles() != s2.n_angles() || s1.n_beamlets() != s2.n_beamlets()) {
    throw DimensionMismatch("rel_misfit: sinogram shapes differ");
  }
  const auto x = s1.values();
  const auto y = s2.values();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - y[i]) * (x[i] - y[i]);
    den += y[i] * y[i];
  }
  if (den == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {std::sqrt(num / den), false};
}

}  // namespace tomocor
