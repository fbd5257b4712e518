#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tomocor/projector.hpp"
#include "tomocor/shift.hpp"

namespace tomocor {

/// Objective value and gradient over the stacked variable vector
/// [image pixels | auxiliary drift parameters].
struct ObjectiveReport {
  double value = 0.0;
  std::vector<double> gradient;
};

using ObjectiveFn = std::function<ObjectiveReport(std::span<const double>)>;

class Objective {
 public:
  virtual ~Objective() = default;
  /// Total length of the variable vector.
  virtual std::size_t dimension() const = 0;
  /// Number of leading image coordinates (bounded below by zero).
  virtual std::size_t image_size() const = 0;
  virtual ObjectiveReport evaluate(std::span<const double> x) const = 0;

  ObjectiveFn as_function() const {
    return [this](std::span<const double> x) { return evaluate(x); };
  }
};

/// 1/2 ||L w - vec(D)||^2
class StandardObjective : public Objective {
 public:
  StandardObjective(const SystemMatrix& L, const Sinogram& d);
  std::size_t dimension() const override { return L_->cols(); }
  std::size_t image_size() const override { return L_->cols(); }
  ObjectiveReport evaluate(std::span<const double> x) const override;

 private:
  const SystemMatrix* L_;
  const Sinogram* d_;
};

/// Shared machinery for objectives whose data term is 1/2 ||L w - g(D, P)||^2
/// with rows of D translated by per-angle shifts P through the Gaussian kernel.
class ShiftedDataTerm {
 public:
  ShiftedDataTerm(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma);

  const Geometry& geometry() const noexcept { return *geom_; }
  const SystemMatrix& matrix() const noexcept { return *L_; }
  double sigma() const noexcept { return translator_.sigma(); }

  /// g(D, P) with all rows translated.
  Sinogram translated(std::span<const double> shifts) const;

  /// Returns 1/2 ||L w - g(D, P)||^2, writes L^T r into grad_w and
  /// d phi / d P_theta into grad_p (r = L w - g). A shift at or beyond the
  /// detector half-span gives +infinity and NaN gradients.
  double evaluate(std::span<const double> w, std::span<const double> shifts, std::span<double> grad_w,
                  std::span<double> grad_p) const;

 private:
  const SystemMatrix* L_;
  const Geometry* geom_;
  RowTranslator translator_;
  std::vector<std::vector<std::complex<double>>> spectra_;
};

/// Joint objective over (w, P): one free shift per angle.
class ImplicitObjective : public Objective {
 public:
  ImplicitObjective(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma);
  std::size_t dimension() const override { return term_.matrix().cols() + term_.geometry().n_angles; }
  std::size_t image_size() const override { return term_.matrix().cols(); }
  ObjectiveReport evaluate(std::span<const double> x) const override;
  const ShiftedDataTerm& data_term() const noexcept { return term_; }

 private:
  ShiftedDataTerm term_;
};

/// Joint objective over (w, x*, y*). With n_cors == 1 one CoR is shared by
/// every angle; with n_cors == n_angles each angle has its own. Aux layout:
/// [x*_0 .. x*_{m-1}, y*_0 .. y*_{m-1}].
class ExplicitObjective : public Objective {
 public:
  ExplicitObjective(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma,
                    std::size_t n_cors);
  std::size_t dimension() const override { return term_.matrix().cols() + 2 * n_cors_; }
  std::size_t image_size() const override { return term_.matrix().cols(); }
  std::size_t n_cors() const noexcept { return n_cors_; }
  ObjectiveReport evaluate(std::span<const double> x) const override;
  /// P_theta implied by the CoR block of a variable vector.
  std::vector<double> shifts_for(std::span<const double> aux) const;
  const ShiftedDataTerm& data_term() const noexcept { return term_; }

 private:
  ShiftedDataTerm term_;
  std::size_t n_cors_;
};

/// Standard misfit plus lambda ||Lap w||^2 with the 5-point Laplacian and zero
/// values outside the grid.
class L2Objective : public Objective {
 public:
  L2Objective(const SystemMatrix& L, const Sinogram& d, std::size_t n, double lambda);
  std::size_t dimension() const override { return base_.dimension(); }
  std::size_t image_size() const override { return base_.dimension(); }
  ObjectiveReport evaluate(std::span<const double> x) const override;

 private:
  StandardObjective base_;
  std::size_t n_;
  double lambda_;
};

/// Standard misfit plus lambda * sum sqrt(|grad w|^2 + eps^2) (forward
/// differences, replicated boundary).
class TvObjective : public Objective {
 public:
  TvObjective(const SystemMatrix& L, const Sinogram& d, std::size_t n, double lambda, double eps = 1e-6);
  std::size_t dimension() const override { return base_.dimension(); }
  std::size_t image_size() const override { return base_.dimension(); }
  ObjectiveReport evaluate(std::span<const double> x) const override;

 private:
  StandardObjective base_;
  std::size_t n_;
  double lambda_;
  double eps_;
};

/// 5-point Laplacian with zero boundary: out = 4 w_ij - sum of 4 neighbours.
void laplacian(std::size_t n, std::span<const double> w, std::span<double> out);

/// Smoothed isotropic total variation and its gradient (grad may be empty).
double smoothed_tv(std::size_t n, std::span<const double> w, double eps, std::span<double> grad);

ObjectiveReport phi_standard(std::span<const double> w, const Sinogram& d, const SystemMatrix& L);
ObjectiveReport phi_explicit(std::span<const double> w, std::span<const double> x_star,
                             std::span<const double> y_star, const Sinogram& d, const SystemMatrix& L,
                             const Geometry& geom, double sigma);
ObjectiveReport phi_implicit(std::span<const double> w, const ShiftParams& p, const Sinogram& d,
                             const SystemMatrix& L, const Geometry& geom, double sigma);
ObjectiveReport phi_l2(std::span<const double> w, const Sinogram& d, const SystemMatrix& L, std::size_t n,
                       double lambda);
ObjectiveReport phi_tv(std::span<const double> w, const Sinogram& d, const SystemMatrix& L, std::size_t n,
                       double lambda, double eps_huber = 1e-6);

}  // namespace tomocor
