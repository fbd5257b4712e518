#include "tomocor/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "tomocor/error.hpp"
#include "tomocor/noise.hpp"
#include "tomocor/objective.hpp"
#include "tomocor/phantoms.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/shift.hpp"

namespace tomocor {

namespace {

constexpr double kSweepDiskRadius = 0.8;

double exact_projection(SweepPhantom phantom, std::size_t n, double theta, double tau) {
  if (phantom == SweepPhantom::Disk) return disk_line_integral(n, kSweepDiskRadius, 1.0, theta, tau);
  return shepp_logan_line_integral(n, theta, tau);
}

}  // namespace

SweepPhantom parse_sweep_phantom(std::string_view name) {
  if (name == "shepp-logan") return SweepPhantom::SheppLogan;
  if (name == "disk") return SweepPhantom::Disk;
  throw InvalidParameter("unknown phantom '" + std::string(name) + "'");
}

std::size_t grid_for_beamlets(std::size_t n_beamlets) {
  if (n_beamlets < 2) throw InvalidParameter("need at least 2 beamlets");
  auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(n_beamlets) / std::numbers::sqrt2));
  for (std::size_t n = std::max<std::size_t>(lo, 2) - 1; n <= lo + 2; ++n) {
    if (n >= 2 && build_geometry(n, 1).n_beamlets == n_beamlets) return n;
  }
  throw InvalidParameter("no grid side yields " + std::to_string(n_beamlets) + " beamlets");
}

double translation_error(SweepPhantom phantom, std::size_t n_beamlets, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  const std::size_t n = grid_for_beamlets(n_beamlets);
  const Geometry geom = build_geometry(n, 1);
  constexpr double kAngles[] = {0.3, 1.1, 2.0};
  constexpr double kShifts[] = {0.37, 1.73, -2.21};
  RowTranslator translator(geom.n_beamlets, geom.spacing, sigma);

  std::vector<double> row(geom.n_beamlets);
  std::vector<double> moved(geom.n_beamlets);
  double total = 0.0;
  int cases = 0;
  for (double theta : kAngles) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = exact_projection(phantom, n, theta, geom.taus[k]);
    for (double p : kShifts) {
      translator.translate(row, p, moved);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double exact = exact_projection(phantom, n, theta, geom.taus[k] - p);
        num += (moved[k] - exact) * (moved[k] - exact);
        den += exact * exact;
      }
      total += std::sqrt(num / den);
      ++cases;
    }
  }
  return total / cases;
}

std::vector<SweepPoint> sweep_sigma(SweepPhantom phantom, std::span<const std::size_t> n_beamlets,
                                    std::span<const double> sigmas) {
  if (n_beamlets.empty() || sigmas.empty()) throw InvalidParameter("sweep ranges must not be empty");
  std::vector<SweepPoint> out;
  for (std::size_t nt : n_beamlets) {
    for (double s : sigmas) out.push_back({nt, s, translation_error(phantom, nt, s)});
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidParameter("log range needs 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

EvaluationTiming time_implicit_evaluation(std::size_t n, std::size_t n_angles, std::size_t reps,
                                          double min_sample_ms) {
  if (reps == 0) throw InvalidParameter("reps must be positive");
  const Geometry geom = build_geometry(n, n_angles);
  const SystemMatrix L = build_system_matrix(geom);
  PortableRng rng(n * 7919 + n_angles);
  std::vector<double> x(geom.pixels() + n_angles);
  for (std::size_t i = 0; i < geom.pixels(); ++i) x[i] = rng.uniform();
  for (std::size_t a = 0; a < n_angles; ++a) x[geom.pixels() + a] = 2.0 * rng.uniform() - 1.0;
  const Sinogram d = forward(L, std::span<const double>(x).first(geom.pixels()));
  const ImplicitObjective obj(L, d, geom, default_sigma());

  using clock = std::chrono::steady_clock;
  volatile double sink = obj.evaluate(x).value;  // warm-up (FFT plans, caches)
  EvaluationTiming out{n, n_angles, 0.0, {}};
  for (std::size_t r = 0; r < reps; ++r) {
    std::size_t calls = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      sink = obj.evaluate(x).value;
      ++calls;
      elapsed = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    } while (elapsed < min_sample_ms);
    out.samples_ms.push_back(elapsed / static_cast<double>(calls));
  }
  (void)sink;
  std::vector<double> sorted = out.samples_ms;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  out.median_ms = sorted[sorted.size() / 2];
  return out;
}

}  // namespace tomocor
