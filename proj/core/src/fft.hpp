#pragma once

#include <complex>
#include <cstddef>

namespace tomocor::detail {

/// Real-to-complex FFT plans of one length, created once and shared. Execution
/// is thread-safe; buffers need no particular alignment.
class RealFft {
 public:
  static const RealFft& get(std::size_t length);

  std::size_t length() const noexcept { return length_; }
  std::size_t spectrum_length() const noexcept { return length_ / 2 + 1; }

  /// in: length() reals; out: spectrum_length() complex values.
  void forward(double* in, std::complex<double>* out) const;
  /// Unnormalized inverse (result is length() times the signal). Overwrites `in`.
  void inverse(std::complex<double>* in, double* out) const;

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft();

 private:
  explicit RealFft(std::size_t length);

  std::size_t length_;
  void* r2c_;
  void* c2r_;
};

}  // namespace tomocor::detail
