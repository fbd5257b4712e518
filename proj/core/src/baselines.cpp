#include "tomocor/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "tomocor/error.hpp"
#include "tomocor/objective.hpp"

namespace tomocor {

namespace {

// sum_i a[i] * b[i - lag] over the overlap
double lagged_dot(std::span<const double> a, std::span<const double> b, long lag) {
  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());
  double acc = 0.0;
  for (long i = std::max(0L, lag); i < std::min(na, nb + lag); ++i) acc += a[i] * b[i - lag];
  return acc;
}

long integer_peak(std::span<const double> a, std::span<const double> b, std::vector<double>& scores) {
  if (a.empty() || b.empty()) throw InvalidParameter("correlation of empty rows");
  const long lo = -static_cast<long>(b.size()) + 1;
  const long hi = static_cast<long>(a.size()) - 1;
  scores.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  long best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (long lag = lo; lag <= hi; ++lag) {
    const double s = lagged_dot(a, b, lag);
    scores[static_cast<std::size_t>(lag - lo)] = s;
    // ties go to the smallest |lag|
    if (s > best_score || (s == best_score && std::abs(lag) < std::abs(best))) {
      best_score = s;
      best = lag;
    }
  }
  return best;
}

}  // namespace

double correlation_peak(std::span<const double> a, std::span<const double> b) {
  std::vector<double> scores;
  const long best = integer_peak(a, b, scores);
  const long lo = -static_cast<long>(b.size()) + 1;
  const auto at = static_cast<std::size_t>(best - lo);
  if (at == 0 || at + 1 >= scores.size()) return static_cast<double>(best);
  const double ym = scores[at - 1];
  const double y0 = scores[at];
  const double yp = scores[at + 1];
  const double denom = ym - 2.0 * y0 + yp;
  if (!(denom < 0.0)) return static_cast<double>(best);
  return static_cast<double>(best) + std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
}

double correlation_peak_upsampled(std::span<const double> a, std::span<const double> b, std::size_t upsample) {
  if (upsample == 0) throw InvalidParameter("upsample factor must be positive");
  std::vector<double> scores;
  const long best = integer_peak(a, b, scores);

  // Cross-power spectrum of the zero-padded rows; its inverse DFT evaluated at
  // fractional lags is the band-limited interpolant of the correlation.
  const auto& fft = detail::RealFft::get(std::bit_ceil(a.size() + b.size()));
  const std::size_t m = fft.length();
  std::vector<double> buf(m, 0.0);
  std::vector<std::complex<double>> fa(fft.spectrum_length()), fb(fft.spectrum_length());
  std::copy(a.begin(), a.end(), buf.begin());
  fft.forward(buf.data(), fa.data());
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(b.begin(), b.end(), buf.begin());
  fft.forward(buf.data(), fb.data());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= std::conj(fb[k]);

  auto correlation_at = [&](double lag) {
    const double w = 2.0 * std::numbers::pi * lag / static_cast<double>(m);
    double acc = fa[0].real();
    for (std::size_t k = 1; k + 1 < fa.size(); ++k) {
      acc += 2.0 * (fa[k] * std::polar(1.0, w * static_cast<double>(k))).real();
    }
    acc += (fa.back() * std::polar(1.0, w * static_cast<double>(m / 2))).real();
    return acc;
  };

  double best_lag = static_cast<double>(best);
  double best_score = -std::numeric_limits<double>::infinity();
  const long u = static_cast<long>(upsample);
  for (long j = -u; j <= u; ++j) {
    const double lag = static_cast<double>(best) + static_cast<double>(j) / static_cast<double>(u);
    const double c = correlation_at(lag);
    if (c > best_score) {
      best_score = c;
      best_lag = lag;
    }
  }
  return best_lag;
}

MirrorResult mirror_align(const Sinogram& d, const Geometry& geom, double sigma) {
  if (!d.matches(geom)) throw DimensionMismatch("mirror_align: sinogram does not match geometry");
  MirrorResult out;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    for (std::size_t b = a + 1; b < geom.n_angles; ++b) {
      const double gap = std::abs(std::abs(geom.angles[b] - geom.angles[a]) - std::numbers::pi);
      if (gap < best_gap) {
        best_gap = gap;
        out.angle_a = a;
        out.angle_b = b;
      }
    }
  }
  if (geom.n_angles < 2 || best_gap > 2.0 * std::numbers::pi / static_cast<double>(geom.n_angles)) {
    out.pair_warning = true;
  }
  if (geom.n_angles >= 2) {
    // The opposite view reversed along tau sees the same line integrals
    // displaced by twice the offset.
    const auto row_a = d.row(out.angle_a);
    const auto row_b = d.row(out.angle_b);
    std::vector<double> reversed(row_b.rbegin(), row_b.rend());
    out.offset = 0.5 * correlation_peak(row_a, reversed) * geom.spacing;
  }
  out.corrected = align_sinogram(d, ShiftParams(std::vector<double>(geom.n_angles, -out.offset)), sigma, geom);
  return out;
}

void AlternatingConfig::validate() const {
  if (outer_rounds == 0) throw InvalidParameter("alternating: outer_rounds must be positive");
  if (recon_iterations_per_round == 0) throw InvalidParameter("alternating: iterations per round must be positive");
  if (upsample_factor == 0) throw InvalidParameter("alternating: upsample factor must be positive");
  if (!(sigma > 0.0)) throw InvalidParameter("alternating: sigma must be positive");
  solver.validate();
}

AlternatingResult alternating_reproject(const Sinogram& d, const Geometry& geom, const SystemMatrix& L,
                                        const AlternatingConfig& cfg) {
  cfg.validate();
  if (!d.matches(geom)) throw DimensionMismatch("alternating_reproject: sinogram does not match geometry");
  const std::size_t np = geom.pixels();
  const double clamp_limit = 0.25 * static_cast<double>(geom.n_beamlets) * geom.spacing;

  AlternatingResult out;
  out.shifts = ShiftParams::zeros(geom.n_angles);
  out.corrected = d;
  std::vector<double> w(np, 0.0);
  std::vector<double> precond = L.normal_diagonal();
  for (double& v : precond) v = v > 0.0 ? v : 1.0;
  const std::vector<double> lower(np, 0.0);
  SolverConfig inner = cfg.solver;
  inner.max_outer = cfg.recon_iterations_per_round;

  std::vector<bool> clamped(geom.n_angles, false);
  for (std::size_t round = 0; round < cfg.outer_rounds; ++round) {
    StandardObjective obj(L, out.corrected);
    SolverReport rep = tn_minimize(obj.as_function(), w, lower, inner, precond, cfg.observer);
    out.solver_iterations += rep.iterates.empty() ? 0 : rep.iterates.size() - 1;
    w = std::move(rep.x);
    rep.x.clear();
    out.round_reports.push_back(std::move(rep));

    const Sinogram reprojection = forward(L, std::span<const double>(w));
    for (std::size_t a = 0; a < geom.n_angles; ++a) {
      // d(tau) ~ reprojection(tau - o); undo with a shift of -o
      double o = correlation_peak_upsampled(d.row(a), reprojection.row(a), cfg.upsample_factor) * geom.spacing;
      if (std::abs(o) > clamp_limit) {
        o = std::clamp(o, -clamp_limit, clamp_limit);
        clamped[a] = true;
      }
      out.shifts.values[a] = -o;
    }
    out.corrected = align_sinogram(d, out.shifts, cfg.sigma, geom);

    double num = 0.0;
    double den = 0.0;
    const auto c = out.corrected.values();
    const auto r = reprojection.values();
    for (std::size_t i = 0; i < c.size(); ++i) {
      num += (r[i] - c[i]) * (r[i] - c[i]);
      den += c[i] * c[i];
    }
    out.misfit_log.push_back(den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity());
  }
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    if (clamped[a]) out.clamped_angles.push_back(a);
  }
  out.image = Image(geom.n, std::move(w));
  return out;
}

}  // namespace tomocor
