#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tomocor/projector.hpp"

namespace tomocor {

/// Detector translation caused by rotating about (x_star, y_star) instead of
/// the origin: P = x*(1 - cos theta) + y* sin theta.
double shift_amount(double theta, double x_star, double y_star);

/// sigma whose FWHM (2.355 sigma) spans one beamlet: 1/2.355.
double default_sigma();

/// Gaussian kernel entries farther than this many sigma from the center are dropped.
inline constexpr double kKernelTruncation = 6.0;

/// Per-angle detector shifts P_theta in pixel units.
struct ShiftParams {
  std::vector<double> values;

  ShiftParams() = default;
  explicit ShiftParams(std::vector<double> v) : values(std::move(v)) {}
  static ShiftParams zeros(std::size_t n_angles) { return ShiftParams(std::vector<double>(n_angles, 0.0)); }
  /// P_theta of every angle for the given drift model.
  static ShiftParams from_drift(const Geometry& geom, const DriftModel& drift);

  std::size_t size() const noexcept { return values.size(); }
  /// Throws unless there is one finite shift per angle inside the detector span.
  void validate(const Geometry& geom) const;
};

/// Gaussian centered at P sampled on the beamlet grid, truncated at
/// kKernelTruncation * sigma and normalized to unit discrete mass.
struct GaussianKernel {
  double center = 0.0;
  double sigma = 0.0;
  std::vector<double> samples;
};

GaussianKernel gaussian_kernel(double p, double sigma, const Geometry& geom);

/// d/dP of gaussian_kernel(p, sigma, geom).samples.
std::vector<double> kernel_derivative(double p, double sigma, const Geometry& geom);

/// Translates detector rows by a subpixel amount: out(tau) ~ row(tau - P),
/// computed as the circular convolution of the zero-padded row with the
/// sampled Gaussian in the Fourier domain.
///
/// Rows are padded to the next power of two >= 2 * n_beamlets so shifts up to
/// the detector half-span never wrap. One translator is cheap to keep around
/// for a fixed geometry; calls are const and safe from several threads.
class RowTranslator {
 public:
  RowTranslator(std::size_t n_beamlets, double spacing, double sigma);

  std::size_t n_beamlets() const noexcept { return n_beamlets_; }
  std::size_t padded_length() const noexcept { return padded_; }
  double sigma() const noexcept { return sigma_; }
  double spacing() const noexcept { return spacing_; }

  /// Spectrum of a zero-padded row, reusable across shifts.
  std::vector<std::complex<double>> spectrum(std::span<const double> row) const;

  void translate(std::span<const double> row, double p, std::span<double> out) const;

  /// Translation and its derivative with respect to P from a cached spectrum.
  /// `derivative` may be empty when only the value is needed.
  void translate_spectrum(std::span<const std::complex<double>> row_spectrum, double p,
                          std::span<double> out, std::span<double> derivative) const;

  /// Convolution kernel indexed by lag m (tap at offset m*h - P), stored
  /// circularly over the padded length, plus its derivative in P.
  void lag_kernel(double p, std::span<double> kernel, std::span<double> derivative) const;

 private:
  std::size_t n_beamlets_;
  std::size_t padded_;
  double spacing_;
  double sigma_;
};

std::vector<double> translate_row(std::span<const double> row, double p, double sigma, const Geometry& geom);

/// Row theta of the result is row theta of `d` translated by shifts[theta].
Sinogram align_sinogram(const Sinogram& d, const ShiftParams& shifts, double sigma, const Geometry& geom);

}  // namespace tomocor
