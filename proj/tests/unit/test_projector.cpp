#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tomocor/phantoms.hpp"
#include "tomocor/projector.hpp"

using namespace tomocor;

namespace {

std::vector<double> random_vector(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(size);
  for (double& x : v) x = u(gen);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

TEST(Geometry, BeamletCountAndSpacing) {
  const Geometry g = build_geometry(128, 30);
  EXPECT_EQ(g.n_beamlets, 181u);
  EXPECT_NEAR(g.spacing, std::sqrt(2.0) * 128 / 181, 1e-15);
  EXPECT_NEAR(g.spacing, 1.0001, 1e-4);
  ASSERT_EQ(g.angles.size(), 30u);
  EXPECT_NEAR(g.angles[7], 2 * std::numbers::pi * 7 / 30, 1e-15);
}

TEST(Geometry, TwoByTwoSingleAngle) {
  const Geometry g = build_geometry(2, 1);
  ASSERT_EQ(g.n_beamlets, 2u);
  EXPECT_NEAR(g.taus[0], -g.spacing / 2, 1e-15);
  EXPECT_NEAR(g.taus[1], g.spacing / 2, 1e-15);
  ASSERT_EQ(g.angles.size(), 1u);
  EXPECT_EQ(g.angles[0], 0.0);
}

TEST(Geometry, BeamletsSpanTheDiagonal) {
  const Geometry g = build_geometry(64, 30);
  EXPECT_NEAR(g.taus.back() + g.spacing / 2, std::sqrt(2.0) * 32, 1e-12);
  EXPECT_NEAR(g.taus.front() - g.spacing / 2, -std::sqrt(2.0) * 32, 1e-12);
}

TEST(Geometry, RejectsDegenerateInput) {
  EXPECT_THROW(build_geometry(1, 4), std::invalid_argument);
  EXPECT_THROW(build_geometry(8, 0), std::invalid_argument);
}

TEST(TraceRay, AxisAlignedRayCrossesOneColumn) {
  const auto segs = trace_ray(4, 0.0, 0.5);
  ASSERT_EQ(segs.size(), 4u);
  double total = 0.0;
  for (const auto& s : segs) {
    EXPECT_NEAR(s.length, 1.0, 1e-12);
    EXPECT_EQ(s.pixel % 4, 2u);
    total += s.length;
  }
  EXPECT_NEAR(total, 4.0, 1e-12);
}

TEST(TraceRay, MissesOutsideTheGrid) {
  for (double theta : {0.0, 0.3, 1.9, 4.0}) EXPECT_TRUE(trace_ray(16, theta, std::sqrt(2.0) * 16).empty());
}

TEST(TraceRay, DiagonalOfTwoByTwo) {
  double total = 0.0;
  for (const auto& s : trace_ray(2, std::numbers::pi / 4, 0.0)) total += s.length;
  EXPECT_NEAR(total, 2 * std::sqrt(2.0), 1e-12);
}

TEST(SystemMatrix, EntriesArePositiveAndAtMostPixelDiagonal) {
  const Geometry g = build_geometry(24, 17);
  const SystemMatrix L = build_system_matrix(g);
  for (std::size_t r = 0; r < L.rows(); ++r) {
    for (double v : L.row_values(r)) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST(SystemMatrix, RejectsInconsistentStorage) {
  EXPECT_THROW(SystemMatrix(1, 2, 4, {0, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SystemMatrix(1, 1, 4, {0, 1}, {7}, {1.0}), std::invalid_argument);
}

TEST(Forward, ZeroImageGivesZeroSinogram) {
  const Geometry g = build_geometry(16, 8);
  const Sinogram s = forward(build_system_matrix(g), Image(16));
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, IsLinear) {
  const Geometry g = build_geometry(16, 8);
  const SystemMatrix L = build_system_matrix(g);
  const auto w = random_vector(256, 1);
  std::vector<double> w3(w);
  for (double& v : w3) v *= 3.0;
  const Sinogram a = forward(L, w);
  const Sinogram b = forward(L, w3);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.values()[i], 3.0 * a.values()[i], 1e-13 * (1 + b.values()[i]));
}

// A beamlet sees whole pixels, so besides 2h the bound allows the change of
// the chord within one beamlet, which is large where the chord is steep.
TEST(Forward, DiskRowsFollowTheChordProfile) {
  const std::size_t n = 128;
  const Geometry g = build_geometry(n, 7);
  const Sinogram s = forward(build_system_matrix(g), make_disk(n, 0.8, 1.0));
  const double h = g.spacing;
  for (std::size_t a = 0; a < g.n_angles; ++a) {
    for (std::size_t k = 0; k < g.n_beamlets; ++k) {
      auto chord = [&](double tau) { return disk_line_integral(n, 0.8, 1.0, g.angles[a], tau); };
      const double c = chord(g.taus[k]);
      const double slack = std::max(std::abs(chord(g.taus[k] - h) - c), std::abs(chord(g.taus[k] + h) - c));
      EXPECT_LE(std::abs(s(a, k) - c), 2 * h + slack) << a << " " << k;
    }
  }
}

TEST(Adjoint, ZeroSinogramGivesZeroImage) {
  const Geometry g = build_geometry(8, 5);
  for (double v : adjoint(build_system_matrix(g), Sinogram(g))) EXPECT_EQ(v, 0.0);
}

TEST(Adjoint, InnerProductIdentity) {
  for (std::size_t n : {8u, 23u}) {
    const Geometry g = build_geometry(n, 9);
    const SystemMatrix L = build_system_matrix(g);
    const auto w = random_vector(n * n, 2);
    const auto y = random_vector(g.rows(), 3);
    const Sinogram s(g.n_angles, g.n_beamlets, y);
    const double lhs = dot(forward(L, w).values(), y);
    const double rhs = dot(w, adjoint(L, s));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * norm(w) * norm(y));
  }
}

TEST(Adjoint, OneHotSinogramGivesRayFootprint) {
  const Geometry g = build_geometry(12, 6);
  const SystemMatrix L = build_system_matrix(g);
  Sinogram s(g);
  s(4, 9) = 1.0;
  const auto back = adjoint(L, s);
  std::vector<double> expected(144, 0.0);
  for (const auto& seg : trace_ray(12, g.angles[4], g.taus[9])) expected[seg.pixel] += seg.length;
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], expected[i], 1e-14);
}

// Past 2^17 columns the forward product switches to column storage.
TEST(SystemMatrix, ProductsAgreeWithRowStorageOnLargeGrids) {
  const Geometry g = build_geometry(400, 2);
  const SystemMatrix L = build_system_matrix(g);
  ASSERT_GT(L.cols(), 1u << 17);
  const auto w = random_vector(L.cols(), 4);
  std::vector<double> out(L.rows());
  L.multiply(w, out);
  for (std::size_t r = 0; r < L.rows(); ++r) {
    double ref = 0.0;
    const auto cols = L.row_columns(r);
    const auto vals = L.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) ref += vals[k] * w[cols[k]];
    EXPECT_NEAR(out[r], ref, 1e-11 * (1 + std::abs(ref)));
  }
  const auto y = random_vector(L.rows(), 5);
  std::vector<double> back(L.cols());
  L.multiply_transpose(y, back);
  EXPECT_NEAR(dot(out, y), dot(w, back), 1e-10 * std::abs(dot(out, y)));
}

TEST(SimulateShifted, NoDriftEqualsForward) {
  const Geometry g = build_geometry(32, 10);
  const Image w = make_shepp_logan(32);
  const Sinogram a = simulate_shifted(g, w, DriftModel::none());
  const Sinogram b = forward(build_system_matrix(g), w);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
}

TEST(SimulateShifted, FirstAngleUnaffectedBySingleCor) {
  const Geometry g = build_geometry(32, 10);
  const Image w = make_shepp_logan(32);
  const Sinogram a = simulate_shifted(g, w, DriftModel::single({2.5, -1.5}));
  const Sinogram b = simulate_shifted(g, w, DriftModel::none());
  for (std::size_t k = 0; k < g.n_beamlets; ++k) EXPECT_NEAR(a(0, k), b(0, k), 1e-12);
}

TEST(DriftModel, ValidationAndLookup) {
  const Geometry g = build_geometry(16, 4);
  EXPECT_NO_THROW(DriftModel::none().validate(g));
  EXPECT_THROW(DriftModel::single({9.0, 0.0}).validate(g), std::invalid_argument);
  EXPECT_THROW(DriftModel::per_angle({{0, 0}, {1, 1}}).validate(g), std::invalid_argument);
  const DriftModel d = DriftModel::per_angle({{0, 0}, {1, 1}, {2, 2}, {3, -3}});
  EXPECT_EQ(d.cor_at(3), (Cor{3, -3}));
  EXPECT_EQ(DriftModel::single({1, 2}).cor_at(2), (Cor{1, 2}));
}
