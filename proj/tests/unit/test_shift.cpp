#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomocor/metrics.hpp"
#include "tomocor/phantoms.hpp"
#include "tomocor/shift.hpp"

using namespace tomocor;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> bump_row(const Geometry& g, double center, double width) {
  std::vector<double> row(g.n_beamlets);
  for (std::size_t k = 0; k < g.n_beamlets; ++k) {
    const double t = (g.taus[k] - center) / width;
    row[k] = std::exp(-0.5 * t * t);
  }
  return row;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST(ShiftAmount, Examples) {
  EXPECT_EQ(shift_amount(0.0, 3.7, -2.1), 0.0);
  EXPECT_NEAR(shift_amount(kPi, 3.0, 5.0), 6.0, 1e-12);
  EXPECT_NEAR(shift_amount(kPi / 2, 2.0, 4.0), 6.0, 1e-12);
}

TEST(ShiftParams, FromDriftAndValidation) {
  const Geometry g = build_geometry(32, 4);
  const ShiftParams p = ShiftParams::from_drift(g, DriftModel::single({1.0, 2.0}));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p.values[1], shift_amount(g.angles[1], 1.0, 2.0), 1e-15);
  EXPECT_EQ(ShiftParams::from_drift(g, DriftModel::none()).values, std::vector<double>(4, 0.0));
  EXPECT_THROW(ShiftParams::zeros(3).validate(g), std::invalid_argument);
  EXPECT_THROW(ShiftParams(std::vector<double>{0, 0, 0, 1e3}).validate(g), std::invalid_argument);
  EXPECT_THROW(ShiftParams(std::vector<double>{0, 0, 0, NAN}).validate(g), std::invalid_argument);
}

TEST(DefaultSigma, FullWidthHalfMaximumIsOneBeamlet) {
  const double s = default_sigma();
  EXPECT_NEAR(s, 0.4246, 1e-4);
  EXPECT_NEAR(2.355 * s, 1.0, 1e-12);
  EXPECT_NEAR(std::exp(-0.25 / (2 * s * s)), 0.5, 1e-3);
}

TEST(GaussianKernel, PeakAtNearestBeamlet) {
  const Geometry g = build_geometry(128, 1);
  for (double p : {0.0, 0.3, -7.61, 12.49}) {
    const auto k = gaussian_kernel(p, 0.42, g);
    const auto nearest = std::min_element(g.taus.begin(), g.taus.end(), [&](double a, double b) {
      return std::abs(a - p) < std::abs(b - p);
    });
    EXPECT_EQ(argmax(k.samples), static_cast<std::size_t>(nearest - g.taus.begin())) << p;
  }
}

TEST(GaussianKernel, UnitMass) {
  const Geometry g = build_geometry(128, 1);
  const auto k = gaussian_kernel(0.0, 0.42, g);
  double sum = 0.0;
  for (double v : k.samples) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-3);
}

TEST(GaussianKernel, EvenAboutCenterOnSymmetricGrid) {
  const Geometry g = build_geometry(128, 1);
  const auto k = gaussian_kernel(0.0, 0.8, g);
  const std::size_t m = g.n_beamlets;
  for (std::size_t i = 0; i < m / 2; ++i) EXPECT_NEAR(k.samples[i], k.samples[m - 1 - i], 1e-12);
}

TEST(KernelDerivative, VanishesAtCenterAndIsOdd) {
  const Geometry g = build_geometry(128, 1);
  const auto d = kernel_derivative(0.0, 0.6, g);
  const std::size_t m = g.n_beamlets;
  EXPECT_NEAR(d[m / 2], 0.0, 1e-14);
  for (std::size_t i = 0; i < m / 2; ++i) EXPECT_NEAR(d[i], -d[m - 1 - i], 1e-12);
}

TEST(KernelDerivative, MatchesDifferenceOfKernels) {
  const Geometry g = build_geometry(64, 1);
  const double p = 1.37;
  const double eps = 1e-5;
  const auto d = kernel_derivative(p, 0.42, g);
  const auto kp = gaussian_kernel(p + eps, 0.42, g).samples;
  const auto km = gaussian_kernel(p - eps, 0.42, g).samples;
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], (kp[i] - km[i]) / (2 * eps), 1e-6);
}

TEST(RowTranslator, DerivativeMatchesCentralDifference) {
  const Geometry g = build_geometry(128, 1);
  const RowTranslator tr(g.n_beamlets, g.spacing, 0.42);
  const auto row = bump_row(g, 3.0, 6.0);
  const auto spec = tr.spectrum(row);
  const double p = -2.3;
  const double eps = 1e-5;
  std::vector<double> out(g.n_beamlets), deriv(g.n_beamlets), plus(g.n_beamlets), minus(g.n_beamlets);
  tr.translate_spectrum(spec, p, out, deriv);
  tr.translate_spectrum(spec, p + eps, plus, {});
  tr.translate_spectrum(spec, p - eps, minus, {});
  for (std::size_t k = 0; k < g.n_beamlets; ++k) EXPECT_NEAR(deriv[k], (plus[k] - minus[k]) / (2 * eps), 1e-6);
}

TEST(TranslateRow, ConstantRowKeepsInteriorValues) {
  const Geometry g = build_geometry(128, 1);
  const std::vector<double> row(g.n_beamlets, 3.25);
  const auto out = translate_row(row, 0.0, 0.42, g);
  for (std::size_t k = 10; k + 10 < g.n_beamlets; ++k) EXPECT_NEAR(out[k], 3.25, 1e-6);
}

TEST(TranslateRow, RoundTripStaysClose) {
  const Geometry g = build_geometry(128, 1);
  const auto row = bump_row(g, -4.0, 8.0);
  const auto back = translate_row(translate_row(row, 2.63, 0.42, g), -2.63, 0.42, g);
  double err = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) err = std::max(err, std::abs(back[k] - row[k]));
  EXPECT_LT(err, 1e-2);
}

TEST(TranslateRow, IntegerShiftMovesPeak) {
  const Geometry g = build_geometry(128, 1);
  std::vector<double> row(g.n_beamlets, 0.0);
  row[70] = 1.0;
  for (int m : {-5, 0, 3, 12}) {
    const auto out = translate_row(row, m * g.spacing, 0.42, g);
    EXPECT_EQ(argmax(out), static_cast<std::size_t>(70 + m));
  }
}

TEST(TranslateRow, LargeShiftsLeaveTheDetectorOrThrow) {
  const Geometry g = build_geometry(16, 1);
  const std::vector<double> row(g.n_beamlets, 1.0);
  for (double v : translate_row(row, 2 * g.detector_half_span() + 3.0, 0.42, g)) EXPECT_NEAR(v, 0.0, 1e-12);
  const RowTranslator tr(g.n_beamlets, g.spacing, 0.42);
  EXPECT_THROW(translate_row(row, static_cast<double>(tr.padded_length()) * g.spacing, 0.42, g),
               std::invalid_argument);
  EXPECT_THROW(translate_row(row, 0.0, 0.0, g), std::invalid_argument);
}

TEST(AlignSinogram, ZeroShiftsKeepUnimodalPeaks) {
  const Geometry g = build_geometry(64, 5);
  Sinogram s(g);
  for (std::size_t a = 0; a < g.n_angles; ++a) {
    const auto row = bump_row(g, -10.0 + 5.0 * a, 3.0);
    std::copy(row.begin(), row.end(), s.row(a).begin());
  }
  const Sinogram out = align_sinogram(s, ShiftParams::zeros(g.n_angles), 0.42, g);
  for (std::size_t a = 0; a < g.n_angles; ++a) EXPECT_EQ(argmax(out.row(a)), argmax(s.row(a)));
}

// Two Gaussian blurs compose into one with the variances added.
TEST(AlignSinogram, SmoothingComposes) {
  const Geometry g = build_geometry(64, 3);
  Sinogram s(g);
  for (std::size_t a = 0; a < g.n_angles; ++a) {
    const auto row = bump_row(g, 4.0 * a - 4.0, 5.0);
    std::copy(row.begin(), row.end(), s.row(a).begin());
  }
  const double sigma = 0.9;
  const auto zero = ShiftParams::zeros(g.n_angles);
  const Sinogram twice = align_sinogram(align_sinogram(s, zero, sigma, g), zero, sigma, g);
  const Sinogram once = align_sinogram(s, zero, std::sqrt(2.0) * sigma, g);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(twice.values()[i], once.values()[i], 1e-6);
}

TEST(AlignSinogram, TrueShiftsUndoDrift) {
  const std::size_t n = 128;
  const Geometry g = build_geometry(n, 30);
  const Image w = make_disk(n, 0.8, 1.0);
  const DriftModel drift = DriftModel::single({2.56, 0.0});
  const Sinogram measured = simulate_shifted(g, w, drift, 4);
  const Sinogram free = simulate_shifted(g, w, DriftModel::none(), 4);
  const Sinogram aligned = align_sinogram(measured, ShiftParams::from_drift(g, drift), 0.42, g);
  EXPECT_LT(rel_misfit(aligned, free).value, 0.02);
  EXPECT_GT(rel_misfit(measured, free).value, 0.1);
}
