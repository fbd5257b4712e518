#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tomocor {

/// Position of a pixel center in the grid-centered frame (x right, y up, one
/// unit per pixel).
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Pixel (row, col) of an n x n grid has center ((col + 0.5) - n/2, n/2 - (row + 0.5)).
Point pixel_center(std::size_t n, std::size_t row, std::size_t col);

/// Nonnegative n x n attenuation grid stored row-major.
class Image {
 public:
  Image() = default;

  /// All-zero image.
  explicit Image(std::size_t n);

  /// Takes ownership of `values`; throws InvalidParameter unless
  /// values.size() == n*n, n >= 2 and every value is finite and >= 0.
  Image(std::size_t n, std::vector<double> values);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * n_ + col]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double min() const;
  double max() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

}  // namespace tomocor
