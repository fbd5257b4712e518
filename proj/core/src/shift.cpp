#include "tomocor/shift.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "tomocor/error.hpp"

namespace tomocor {

double shift_amount(double theta, double x_star, double y_star) {
  return x_star * (1.0 - std::cos(theta)) + y_star * std::sin(theta);
}

double default_sigma() { return 1.0 / 2.355; }

ShiftParams ShiftParams::from_drift(const Geometry& geom, const DriftModel& drift) {
  ShiftParams p = zeros(geom.n_angles);
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    const Cor c = drift.cor_at(a);
    p.values[a] = shift_amount(geom.angles[a], c.x, c.y);
  }
  return p;
}

void ShiftParams::validate(const Geometry& geom) const {
  if (values.size() != geom.n_angles) {
    throw DimensionMismatch("need one shift per angle (" + std::to_string(geom.n_angles) + "), got " +
                            std::to_string(values.size()));
  }
  const double limit = geom.detector_half_span();
  for (double p : values) {
    if (!std::isfinite(p) || std::abs(p) >= limit) throw InvalidParameter("shift outside the detector span");
  }
}

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be positive");
}

// Relative Gaussian weights at offsets d = t - P for the taps kept after
// truncation, normalized to unit sum, and their derivative in P. Offsets
// outside the truncation radius are zero except the one nearest to P.
void normalized_weights(std::span<const double> offsets, double sigma, std::span<double> kernel,
                        std::span<double> derivative) {
  const double radius = kKernelTruncation * sigma;
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (std::abs(offsets[i]) < std::abs(offsets[nearest])) nearest = i;
  }
  const double d0 = offsets.empty() ? 0.0 : offsets[nearest];
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double inv_s2 = 1.0 / (sigma * sigma);

  double sum = 0.0;
  double dsum = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double d = offsets[i];
    double w = 0.0;
    if (std::abs(d) <= radius || i == nearest) w = std::exp(-(d * d - d0 * d0) * inv2s2);
    kernel[i] = w;
    sum += w;
    if (!derivative.empty()) {
      // d/dP exp(-(t - P)^2 / 2 sigma^2) = w (t - P) / sigma^2
      derivative[i] = w * d * inv_s2;
      dsum += derivative[i];
    }
  }
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double k = kernel[i] / sum;
    if (!derivative.empty()) derivative[i] = derivative[i] / sum - k * dsum / sum;
    kernel[i] = k;
  }
}

}  // namespace

GaussianKernel gaussian_kernel(double p, double sigma, const Geometry& geom) {
  check_sigma(sigma);
  std::vector<double> offsets(geom.taus.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) offsets[k] = geom.taus[k] - p;
  GaussianKernel kern{p, sigma, std::vector<double>(offsets.size())};
  normalized_weights(offsets, sigma, kern.samples, {});
  return kern;
}

std::vector<double> kernel_derivative(double p, double sigma, const Geometry& geom) {
  check_sigma(sigma);
  std::vector<double> offsets(geom.taus.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) offsets[k] = geom.taus[k] - p;
  std::vector<double> kernel(offsets.size());
  std::vector<double> deriv(offsets.size());
  normalized_weights(offsets, sigma, kernel, deriv);
  return deriv;
}

RowTranslator::RowTranslator(std::size_t n_beamlets, double spacing, double sigma)
    : n_beamlets_(n_beamlets), padded_(std::bit_ceil(2 * std::max<std::size_t>(n_beamlets, 1))),
      spacing_(spacing), sigma_(sigma) {
  check_sigma(sigma);
  if (!(spacing > 0.0)) throw InvalidParameter("beamlet spacing must be positive");
}

void RowTranslator::lag_kernel(double p, std::span<double> kernel, std::span<double> derivative) const {
  if (kernel.size() != padded_ || (!derivative.empty() && derivative.size() != padded_)) {
    throw DimensionMismatch("lag_kernel: buffers must have the padded length");
  }
  std::fill(kernel.begin(), kernel.end(), 0.0);
  if (!derivative.empty()) std::fill(derivative.begin(), derivative.end(), 0.0);

  const auto half = static_cast<long>(padded_ / 2);
  const double radius = kKernelTruncation * sigma_;
  const auto nearest = static_cast<long>(std::lround(p / spacing_));
  long lo = std::min(static_cast<long>(std::ceil((p - radius) / spacing_)), nearest);
  long hi = std::max(static_cast<long>(std::floor((p + radius) / spacing_)), nearest);
  lo = std::max(lo, -half + 1);
  hi = std::min(hi, half);
  if (lo > hi) throw InvalidParameter("shift too large for the padded detector");

  const auto taps = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> offsets(taps);
  std::vector<double> w(taps);
  std::vector<double> dw(derivative.empty() ? 0 : taps);
  for (std::size_t i = 0; i < taps; ++i) offsets[i] = static_cast<double>(lo + static_cast<long>(i)) * spacing_ - p;
  normalized_weights(offsets, sigma_, w, dw);

  const auto len = static_cast<long>(padded_);
  for (std::size_t i = 0; i < taps; ++i) {
    const long m = lo + static_cast<long>(i);
    const auto idx = static_cast<std::size_t>(((m % len) + len) % len);
    kernel[idx] = w[i];
    if (!derivative.empty()) derivative[idx] = dw[i];
  }
}

std::vector<std::complex<double>> RowTranslator::spectrum(std::span<const double> row) const {
  if (row.size() != n_beamlets_) throw DimensionMismatch("row length does not match the translator");
  const auto& fft = detail::RealFft::get(padded_);
  std::vector<double> buf(padded_, 0.0);
  std::copy(row.begin(), row.end(), buf.begin());
  std::vector<std::complex<double>> spec(fft.spectrum_length());
  fft.forward(buf.data(), spec.data());
  return spec;
}

void RowTranslator::translate_spectrum(std::span<const std::complex<double>> row_spectrum, double p,
                                       std::span<double> out, std::span<double> derivative) const {
  const auto& fft = detail::RealFft::get(padded_);
  if (row_spectrum.size() != fft.spectrum_length() || out.size() != n_beamlets_ ||
      (!derivative.empty() && derivative.size() != n_beamlets_)) {
    throw DimensionMismatch("translate_spectrum: buffer sizes");
  }
  const bool want_derivative = !derivative.empty();
  std::vector<double> kern(padded_);
  std::vector<double> dkern(want_derivative ? padded_ : 0);
  lag_kernel(p, kern, dkern);

  const double scale = 1.0 / static_cast<double>(padded_);
  std::vector<std::complex<double>> spec(fft.spectrum_length());
  std::vector<double> result(padded_);

  fft.forward(kern.data(), spec.data());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= row_spectrum[i];
  fft.inverse(spec.data(), result.data());
  for (std::size_t k = 0; k < n_beamlets_; ++k) out[k] = result[k] * scale;

  if (want_derivative) {
    fft.forward(dkern.data(), spec.data());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= row_spectrum[i];
    fft.inverse(spec.data(), result.data());
    for (std::size_t k = 0; k < n_beamlets_; ++k) derivative[k] = result[k] * scale;
  }
}

void RowTranslator::translate(std::span<const double> row, double p, std::span<double> out) const {
  const auto spec = spectrum(row);
  translate_spectrum(spec, p, out, {});
}

std::vector<double> translate_row(std::span<const double> row, double p, double sigma, const Geometry& geom) {
  if (row.size() != geom.n_beamlets) throw DimensionMismatch("translate_row: row length != n_beamlets");
  if (!std::isfinite(p)) throw InvalidParameter("translate_row: shift must be finite");
  RowTranslator tr(geom.n_beamlets, geom.spacing, sigma);
  std::vector<double> out(row.size());
  tr.translate(row, p, out);
  return out;
}

Sinogram align_sinogram(const Sinogram& d, const ShiftParams& shifts, double sigma, const Geometry& geom) {
  if (!d.matches(geom)) throw DimensionMismatch("align_sinogram: sinogram does not match geometry");
  if (shifts.size() != d.n_angles()) throw DimensionMismatch("align_sinogram: one shift per angle required");
  RowTranslator tr(geom.n_beamlets, geom.spacing, sigma);
  Sinogram out(geom);
  for (std::size_t a = 0; a < d.n_angles(); ++a) tr.translate(d.row(a), shifts.values[a], out.row(a));
  return out;
}

}  // namespace tomocor
