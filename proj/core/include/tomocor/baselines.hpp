#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomocor/image.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/shift.hpp"
#include "tomocor/solver.hpp"

namespace tomocor {

struct MirrorResult {
  /// Estimated detector offset: the measured rows look like the drift-free
  /// rows moved by +offset along tau.
  double offset = 0.0;
  Sinogram corrected;
  std::size_t angle_a = 0;
  std::size_t angle_b = 0;
  /// Set when no pair of angles lies within pi +- 2 pi / n_angles.
  bool pair_warning = false;
};

/// Single-offset correction from the projection pair closest to being
/// mirror images (theta_b - theta_a closest to pi). The reversed second row is
/// cross-correlated with the first; the integer peak is refined by a parabola.
MirrorResult mirror_align(const Sinogram& d, const Geometry& geom, double sigma = default_sigma());

/// Offset o maximizing the normalized cross-correlation sum_i a[i] b[i - o],
/// i.e. a(tau) ~ b(tau - o), refined to subpixel by a parabolic fit. In beamlet units.
double correlation_peak(std::span<const double> a, std::span<const double> b);

/// Like correlation_peak but refined on a grid of 1/upsample beamlets within
/// one beamlet of the integer peak, using the band-limited (DFT) interpolant
/// of the correlation.
double correlation_peak_upsampled(std::span<const double> a, std::span<const double> b, std::size_t upsample);

struct AlternatingConfig {
  std::size_t outer_rounds = 10;
  std::size_t recon_iterations_per_round = 10;
  std::size_t upsample_factor = 10;
  double sigma = default_sigma();
  SolverConfig solver;
  /// Called for every iterate of every per-round solve.
  IterationObserver observer;

  void validate() const;
};

struct AlternatingResult {
  Image image;
  /// Shifts in align_sinogram convention: align_sinogram(d, shifts) is the
  /// final corrected sinogram.
  ShiftParams shifts;
  Sinogram corrected;
  /// ||L w - corrected|| / ||corrected|| after each round.
  std::vector<double> misfit_log;
  /// Angles whose correlation shift exceeded a quarter of the detector span and was clamped.
  std::vector<std::size_t> clamped_angles;
  std::size_t solver_iterations = 0;
  /// Report of each round's solve (x left empty).
  std::vector<SolverReport> round_reports;
};

/// Simplified alternating reprojection: reconstruct a few TN iterations from
/// the current corrected data, reproject, re-estimate each row's shift by
/// cross-correlating the measured row with the reprojection, repeat.
AlternatingResult alternating_reproject(const Sinogram& d, const Geometry& geom, const SystemMatrix& L,
                                        const AlternatingConfig& cfg);

}  // namespace tomocor
