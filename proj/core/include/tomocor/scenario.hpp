#pragma once

#include <cstddef>
#include <cstdint>

#include "tomocor/image.hpp"
#include "tomocor/noise.hpp"
#include "tomocor/projector.hpp"

namespace tomocor {

/// One CoR at distance scale * n from the origin in direction angle_rad.
DriftModel make_single_drift(std::size_t n, double scale, double angle_rad = 0.0);

/// Per-angle CoR drawn as a seeded random walk: the walk starts at the origin
/// and every angle adds a step drawn uniformly from the disk of radius
/// scale * n. Positions are clamped to the field of view.
DriftModel make_random_walk_drift(const Geometry& geom, double scale, std::uint64_t seed);

/// Everything needed to run one synthetic experiment.
struct Scenario {
  Image truth;
  Geometry geom;
  SystemMatrix L;
  DriftModel drift;
  Sinogram drift_free;  // forward(L, truth)
  Sinogram measured;    // simulate_shifted(...) plus optional noise
};

Scenario make_scenario(Image truth, std::size_t n_angles, DriftModel drift, const NoiseSpec& noise = {},
                       std::size_t oversample = 1);

}  // namespace tomocor
