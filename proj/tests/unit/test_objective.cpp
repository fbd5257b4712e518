#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/fd_check.hpp"
#include "tomocor/objective.hpp"
#include "tomocor/phantoms.hpp"

using namespace tomocor;

namespace {

struct Instance {
  std::size_t n;
  Geometry geom;
  SystemMatrix L;
  Image truth;
  Sinogram d;
  std::vector<double> w;
};

Instance make_instance(std::size_t n, std::size_t n_angles, DriftModel drift, std::uint64_t seed) {
  Instance in{n, build_geometry(n, n_angles), {}, make_disk(n, 0.6, 1.0), {}, {}};
  in.L = build_system_matrix(in.geom);
  in.d = simulate_shifted(in.geom, in.truth, drift, 2);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  in.w.resize(n * n);
  for (double& v : in.w) v = u(gen);
  return in;
}

std::vector<double> with_aux(std::vector<double> w, std::initializer_list<double> aux) {
  w.insert(w.end(), aux);
  return w;
}

double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

TEST(StandardObjective, ExactFitHasZeroValueAndGradient) {
  auto in = make_instance(8, 6, DriftModel::none(), 1);
  const Sinogram d = forward(in.L, in.truth);
  const auto r = phi_standard(in.truth.values(), d, in.L);
  EXPECT_NEAR(r.value, 0.0, 1e-24);
  for (double g : r.gradient) EXPECT_NEAR(g, 0.0, 1e-12);
}

TEST(StandardObjective, ZeroImageGivesHalfSquaredData) {
  auto in = make_instance(8, 6, DriftModel::none(), 1);
  const std::vector<double> zero(64, 0.0);
  EXPECT_NEAR(phi_standard(zero, in.d, in.L).value, 0.5 * sum_sq(in.d.values()), 1e-12);
}

TEST(StandardObjective, GradientMatchesFiniteDifferences) {
  auto in = make_instance(8, 6, DriftModel::none(), 2);
  StandardObjective obj(in.L, in.d);
  EXPECT_LT(fdcheck::check_gradient(obj.as_function(), in.w).max_rel_error, 1e-6);
}

TEST(StandardObjective, RejectsMismatchedSizes) {
  auto in = make_instance(8, 6, DriftModel::none(), 2);
  EXPECT_THROW(StandardObjective(in.L, Sinogram(3, 4)), std::invalid_argument);
  StandardObjective obj(in.L, in.d);
  EXPECT_THROW(obj.evaluate(std::vector<double>(5)), std::invalid_argument);
}

TEST(ExplicitObjective, ZeroCorApproachesStandardOnSmoothData) {
  auto in = make_instance(32, 12, DriftModel::none(), 3);
  std::vector<double> half(in.truth.values().begin(), in.truth.values().end());
  for (double& v : half) v *= 0.5;
  const double zero[] = {0.0};
  const double e = phi_explicit(half, zero, zero, in.d, in.L, in.geom, 0.42).value;
  const double s = phi_standard(half, in.d, in.L).value;
  EXPECT_NEAR(e, s, 0.01 * s);
}

TEST(ExplicitObjective, TrueCorBeatsZeroCor) {
  const Cor c{1.8, -1.1};
  auto in = make_instance(32, 12, DriftModel::single(c), 3);
  const double x0[] = {c.x}, y0[] = {c.y}, zero[] = {0.0};
  const double at_truth = phi_explicit(in.truth.values(), x0, y0, in.d, in.L, in.geom, 0.42).value;
  const double at_zero = phi_explicit(in.truth.values(), zero, zero, in.d, in.L, in.geom, 0.42).value;
  EXPECT_LT(10 * at_truth, at_zero);
}

TEST(ExplicitObjective, GradientMatchesFiniteDifferences) {
  auto in = make_instance(8, 6, DriftModel::single({0.7, -0.4}), 4);
  ExplicitObjective single(in.L, in.d, in.geom, 0.42, 1);
  EXPECT_LT(fdcheck::check_gradient(single.as_function(), with_aux(in.w, {0.31, -0.52})).max_rel_error, 1e-6);
  ExplicitObjective per_angle(in.L, in.d, in.geom, 0.42, 6);
  const auto x = with_aux(in.w, {0.3, -0.2, 0.5, 0.1, -0.6, 0.4, 0.2, 0.7, -0.3, -0.1, 0.6, 0.25});
  EXPECT_LT(fdcheck::check_gradient(per_angle.as_function(), x).max_rel_error, 1e-6);
}

TEST(ExplicitObjective, ShiftsOutsideTheDetectorAreInfinite) {
  auto in = make_instance(8, 6, DriftModel::none(), 4);
  ExplicitObjective obj(in.L, in.d, in.geom, 0.42, 1);
  const auto r = obj.evaluate(with_aux(in.w, {50.0, 0.0}));
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_TRUE(std::isnan(r.gradient.front()));
  EXPECT_THROW(ExplicitObjective(in.L, in.d, in.geom, 0.42, 4), std::invalid_argument);
}

TEST(ImplicitObjective, ZeroShiftsEqualExplicitAtOrigin) {
  auto in = make_instance(16, 8, DriftModel::single({1.0, 0.5}), 5);
  const double zero[] = {0.0};
  const double e = phi_explicit(in.w, zero, zero, in.d, in.L, in.geom, 0.42).value;
  const double i = phi_implicit(in.w, ShiftParams::zeros(8), in.d, in.L, in.geom, 0.42).value;
  EXPECT_EQ(e, i);
}

TEST(ImplicitObjective, CorShiftsEqualExplicitAtThatCor) {
  const Cor c{1.3, -0.8};
  auto in = make_instance(16, 8, DriftModel::single(c), 5);
  const double xs[] = {c.x}, ys[] = {c.y};
  const double e = phi_explicit(in.w, xs, ys, in.d, in.L, in.geom, 0.42).value;
  const double i =
      phi_implicit(in.w, ShiftParams::from_drift(in.geom, DriftModel::single(c)), in.d, in.L, in.geom, 0.42).value;
  EXPECT_NEAR(e, i, 1e-12 * e);
}

TEST(ImplicitObjective, GradientMatchesFiniteDifferences) {
  auto in = make_instance(8, 6, DriftModel::single({0.7, -0.4}), 6);
  ImplicitObjective obj(in.L, in.d, in.geom, 0.42);
  const auto x = with_aux(in.w, {0.0, 0.4, -0.9, 1.2, 0.3, -0.5});
  EXPECT_LT(fdcheck::check_gradient(obj.as_function(), x).max_rel_error, 1e-6);
}

TEST(L2Objective, ZeroLambdaIsStandard) {
  auto in = make_instance(8, 6, DriftModel::none(), 7);
  const auto a = phi_l2(in.w, in.d, in.L, 8, 0.0);
  const auto b = phi_standard(in.w, in.d, in.L);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.gradient, b.gradient);
}

TEST(Laplacian, ConstantImageOnlyNonzeroOnBoundaryRing) {
  const std::size_t n = 6;
  const std::vector<double> w(n * n, 2.0);
  std::vector<double> out(n * n);
  laplacian(n, w, out);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool ring = i == 0 || j == 0 || i == n - 1 || j == n - 1;
      if (ring) {
        EXPECT_GT(out[i * n + j], 0.0);
      } else {
        EXPECT_EQ(out[i * n + j], 0.0);
      }
    }
  }
}

TEST(L2Objective, GradientMatchesFiniteDifferences) {
  auto in = make_instance(8, 6, DriftModel::none(), 8);
  L2Objective obj(in.L, in.d, 8, 0.7);
  EXPECT_LT(fdcheck::check_gradient(obj.as_function(), in.w).max_rel_error, 1e-6);
}

TEST(TvObjective, ZeroLambdaIsStandard) {
  auto in = make_instance(8, 6, DriftModel::none(), 9);
  EXPECT_EQ(phi_tv(in.w, in.d, in.L, 8, 0.0).value, phi_standard(in.w, in.d, in.L).value);
}

TEST(TvObjective, ConstantImagePaysOnlyTheSmoothing) {
  auto in = make_instance(8, 6, DriftModel::none(), 9);
  const std::vector<double> w(64, 0.8);
  const double lambda = 2.5;
  const double eps = 1e-3;
  const double tv = phi_tv(w, in.d, in.L, 8, lambda, eps).value - phi_standard(w, in.d, in.L).value;
  EXPECT_NEAR(tv, lambda * 64 * eps, 1e-9);
}

TEST(TvObjective, GradientMatchesFiniteDifferences) {
  auto in = make_instance(8, 6, DriftModel::none(), 10);
  TvObjective obj(in.L, in.d, 8, 0.7, 1e-6);
  EXPECT_LT(fdcheck::check_gradient(obj.as_function(), in.w).max_rel_error, 1e-6);
}
