#include "tomocor/noise.hpp"

#include <cmath>
#include <numbers>

#include "tomocor/error.hpp"

namespace tomocor {

void NoiseSpec::validate() const {
  if (!(level >= 0.0) || !std::isfinite(level)) throw InvalidParameter("noise level must be finite and >= 0");
}

PortableRng::PortableRng(std::uint64_t seed) : engine_(seed) {}

double PortableRng::uniform() {
  // top 53 bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Sinogram add_noise(const Sinogram& d, const NoiseSpec& spec) {
  spec.validate();
  Sinogram out = d;
  if (spec.level == 0.0 || d.size() == 0) return out;
  double sq = 0.0;
  for (double v : d.values()) sq += v * v;
  const double stddev = spec.level * std::sqrt(sq / static_cast<double>(d.size()));
  PortableRng rng(spec.seed);
  for (double& v : out.values()) v += stddev * rng.normal();
  return out;
}

}  // namespace tomocor
