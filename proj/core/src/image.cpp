#include "tomocor/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tomocor/error.hpp"

namespace tomocor {

Point pixel_center(std::size_t n, std::size_t row, std::size_t col) {
  const double half = 0.5 * static_cast<double>(n);
  return {static_cast<double>(col) + 0.5 - half, half - (static_cast<double>(row) + 0.5)};
}

Image::Image(std::size_t n) : n_(n), values_(n * n, 0.0) {
  if (n < 2) throw InvalidParameter("image side must be >= 2");
}

Image::Image(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n < 2) throw InvalidParameter("image side must be >= 2");
  if (values_.size() != n * n) {
    throw InvalidParameter("image of side " + std::to_string(n) + " needs " + std::to_string(n * n) +
                           " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidParameter("image values must be finite and nonnegative");
  }
}

double Image::min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

double Image::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

}  // namespace tomocor
