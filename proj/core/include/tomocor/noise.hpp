#pragma once

#include <cstdint>
#include <random>

#include "tomocor/projector.hpp"

namespace tomocor {

/// Additive zero-mean Gaussian noise with standard deviation level * rms(D).
struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Reproducible per (input, seed): normals come from std::mt19937_64 (whose
/// output sequence is fixed by the C++ standard) through 53-bit uniforms and
/// the Box-Muller transform, so sequences match across platforms.
Sinogram add_noise(const Sinogram& d, const NoiseSpec& spec);

/// Portable seeded source of uniforms and standard normals.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed);
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tomocor
