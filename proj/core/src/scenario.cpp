#include "tomocor/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomocor/error.hpp"

namespace tomocor {

DriftModel make_single_drift(std::size_t n, double scale, double angle_rad) {
  if (!std::isfinite(scale) || !std::isfinite(angle_rad)) throw InvalidParameter("drift scale must be finite");
  const double r = scale * static_cast<double>(n);
  return DriftModel::single({r * std::cos(angle_rad), r * std::sin(angle_rad)});
}

DriftModel make_random_walk_drift(const Geometry& geom, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidParameter("drift scale must be finite and >= 0");
  const double radius = scale * static_cast<double>(geom.n);
  const double limit = static_cast<double>(geom.n) / 2.0;
  PortableRng rng(seed);
  std::vector<Cor> cors;
  cors.reserve(geom.n_angles);
  Cor at{0.0, 0.0};
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    at.x = std::clamp(at.x + r * std::cos(phi), -limit, limit);
    at.y = std::clamp(at.y + r * std::sin(phi), -limit, limit);
    cors.push_back(at);
  }
  return DriftModel::per_angle(std::move(cors));
}

Scenario make_scenario(Image truth, std::size_t n_angles, DriftModel drift, const NoiseSpec& noise,
                       std::size_t oversample) {
  Geometry geom = build_geometry(truth.n(), n_angles);
  drift.validate(geom);
  noise.validate();
  SystemMatrix L = build_system_matrix(geom);
  Sinogram drift_free = forward(L, truth);
  Sinogram measured = add_noise(simulate_shifted(geom, truth, drift, oversample), noise);
  return Scenario{std::move(truth), std::move(geom), std::move(L), std::move(drift), std::move(drift_free),
                  std::move(measured)};
}

}  // namespace tomocor
