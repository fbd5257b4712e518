#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace tomocor::detail {

namespace {
// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

const RealFft& RealFft::get(std::size_t length) {
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(length);
  if (it == cache.end()) it = cache.emplace(length, std::unique_ptr<RealFft>(new RealFft(length))).first;
  return *it->second;
}

RealFft::RealFft(std::size_t length) : length_(length) {
  std::vector<double> real(length);
  std::vector<std::complex<double>> spec(length / 2 + 1);
  const int n = static_cast<int>(length);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  r2c_ = fftw_plan_dft_r2c_1d(n, real.data(), cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  c2r_ = fftw_plan_dft_c2r_1d(n, cplx, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
}

// Only reached from static destruction of the cache.
RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(c2r_));
}

void RealFft::forward(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), in, reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace tomocor::detail
