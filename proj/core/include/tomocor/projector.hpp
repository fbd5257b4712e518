#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tomocor/image.hpp"

namespace tomocor {

/// Parallel-beam acquisition geometry. Angles are 2*pi*i/n_angles; beamlets are
/// equally spaced with spacing h and centered on the rotation axis.
struct Geometry {
  std::size_t n = 0;
  std::size_t n_angles = 0;
  std::size_t n_beamlets = 0;
  double spacing = 0.0;
  std::vector<double> angles;
  std::vector<double> taus;

  std::size_t rows() const noexcept { return n_angles * n_beamlets; }
  std::size_t pixels() const noexcept { return n * n; }
  /// Half-width of the detector, n_beamlets * h / 2.
  double detector_half_span() const noexcept { return 0.5 * static_cast<double>(n_beamlets) * spacing; }
};

/// N_tau = floor(sqrt(2) n), h = sqrt(2) n / N_tau so the beamlets cover the grid diagonal.
Geometry build_geometry(std::size_t n, std::size_t n_angles);

/// Same layout with an explicit beamlet count; h = sqrt(2) n / n_beamlets.
Geometry build_geometry(std::size_t n, std::size_t n_angles, std::size_t n_beamlets);

/// Projection data, one row of n_beamlets values per angle.
class Sinogram {
 public:
  Sinogram() = default;
  Sinogram(std::size_t n_angles, std::size_t n_beamlets);
  Sinogram(std::size_t n_angles, std::size_t n_beamlets, std::vector<double> values);
  explicit Sinogram(const Geometry& geom) : Sinogram(geom.n_angles, geom.n_beamlets) {}

  std::size_t n_angles() const noexcept { return n_angles_; }
  std::size_t n_beamlets() const noexcept { return n_beamlets_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> row(std::size_t angle) const {
    return {values_.data() + angle * n_beamlets_, n_beamlets_};
  }
  std::span<double> row(std::size_t angle) { return {values_.data() + angle * n_beamlets_, n_beamlets_}; }

  double operator()(std::size_t angle, std::size_t beamlet) const {
    return values_[angle * n_beamlets_ + beamlet];
  }
  double& operator()(std::size_t angle, std::size_t beamlet) { return values_[angle * n_beamlets_ + beamlet]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool matches(const Geometry& geom) const noexcept {
    return n_angles_ == geom.n_angles && n_beamlets_ == geom.n_beamlets;
  }

  friend bool operator==(const Sinogram&, const Sinogram&) = default;

 private:
  std::size_t n_angles_ = 0;
  std::size_t n_beamlets_ = 0;
  std::vector<double> values_;
};

/// Sparse matrix of ray/pixel intersection lengths, kept in both row- and
/// column-compressed form. Row
/// a * n_beamlets + k belongs to angle a, beamlet k; column i * n + j to pixel (i, j).
class SystemMatrix {
 public:
  SystemMatrix() = default;
  SystemMatrix(std::size_t n_angles, std::size_t n_beamlets, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::uint32_t> col_index, std::vector<double> values);

  std::size_t n_angles() const noexcept { return n_angles_; }
  std::size_t n_beamlets() const noexcept { return n_beamlets_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::uint32_t> row_columns(std::size_t r) const {
    return {col_index_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  /// out = L x
  void multiply(std::span<const double> x, std::span<double> out) const;
  /// out = L^T y
  void multiply_transpose(std::span<const double> y, std::span<double> out) const;
  /// Diagonal of L^T L (squared column norms).
  std::vector<double> normal_diagonal() const;

 private:
  std::size_t n_angles_ = 0;
  std::size_t n_beamlets_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_index_;
  std::vector<double> values_;
  // column-compressed copy used by the products
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::uint32_t> row_index_;
  std::vector<double> col_values_;
};

/// One pixel crossed by a ray together with the chord length inside it.
struct RaySegment {
  std::uint32_t pixel;
  double length;
};

/// Exact intersection lengths of the line {x cos(theta) + y sin(theta) = tau}
/// with the pixels of an n x n grid, in traversal order. Empty when the line
/// misses the grid.
std::vector<RaySegment> trace_ray(std::size_t n, double theta, double tau);

SystemMatrix build_system_matrix(const Geometry& geom);

Sinogram forward(const SystemMatrix& L, const Image& w);
Sinogram forward(const SystemMatrix& L, std::span<const double> w);
std::vector<double> adjoint(const SystemMatrix& L, const Sinogram& s);

/// Center-of-rotation coordinates in pixel units, grid-centered frame.
struct Cor {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Cor&, const Cor&) = default;
};

enum class DriftKind { None, Single, PerAngle };

/// Where the stage rotated about while each projection was taken.
struct DriftModel {
  DriftKind kind = DriftKind::None;
  std::vector<Cor> cors;

  static DriftModel none() { return {}; }
  static DriftModel single(Cor cor) { return {DriftKind::Single, {cor}}; }
  static DriftModel per_angle(std::vector<Cor> cors) { return {DriftKind::PerAngle, std::move(cors)}; }

  /// CoR in effect at angle index `angle`.
  Cor cor_at(std::size_t angle) const;
  /// Throws InvalidParameter when the model does not fit `geom` or a CoR
  /// leaves the field of view (|x|, |y| <= n/2).
  void validate(const Geometry& geom) const;

  friend bool operator==(const DriftModel&, const DriftModel&) = default;
};

/// Sinogram measured while the stage rotates about drifting centers. Beamlet
/// tau at angle theta integrates the image along the drift-free line at
/// distance tau + P_theta from the origin, where
/// P_theta = x*(1 - cos theta) + y* sin theta; translating each row by
/// +P_theta (align_sinogram) therefore undoes the drift. Each beamlet is
/// averaged over `oversample` equally spaced sub-rays.
Sinogram simulate_shifted(const Geometry& geom, const Image& w, const DriftModel& drift,
                          std::size_t oversample = 1);

}  // namespace tomocor
