#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tomocor {

enum class SweepPhantom { SheppLogan, Disk };

/// Throws InvalidParameter on unknown names ("shepp-logan", "disk").
SweepPhantom parse_sweep_phantom(std::string_view name);

/// Smallest grid side n with floor(sqrt(2) n) == n_beamlets. Throws when no
/// grid produces that many beamlets.
std::size_t grid_for_beamlets(std::size_t n_beamlets);

/// Relative RMS error of translate_row against the exact projection of the
/// continuous phantom at tau - P, averaged over angles {0.3, 1.1, 2.0} rad
/// and shifts {0.37, 1.73, -2.21} pixels.
double translation_error(SweepPhantom phantom, std::size_t n_beamlets, double sigma);

struct SweepPoint {
  std::size_t n_beamlets = 0;
  double sigma = 0.0;
  double error = 0.0;
};

std::vector<SweepPoint> sweep_sigma(SweepPhantom phantom, std::span<const std::size_t> n_beamlets,
                                    std::span<const double> sigmas);

/// count values from lo to hi, evenly spaced in log scale (count >= 2, 0 < lo < hi).
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct EvaluationTiming {
  std::size_t n = 0;
  std::size_t n_angles = 0;
  double median_ms = 0.0;
  std::vector<double> samples_ms;
};

/// Wall time of one (value, gradient) evaluation of the implicit objective on
/// a random image, median over `reps` samples. Each sample averages enough
/// back-to-back evaluations to last at least `min_sample_ms`.
EvaluationTiming time_implicit_evaluation(std::size_t n, std::size_t n_angles, std::size_t reps,
                                          double min_sample_ms = 20.0);

}  // namespace tomocor
