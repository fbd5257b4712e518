#include "tomocor/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tomocor/error.hpp"
#include "tomocor/parallel.hpp"
#include "tomocor/shift.hpp"

namespace tomocor {

Geometry build_geometry(std::size_t n, std::size_t n_angles) {
  if (n < 2) throw InvalidParameter("build_geometry: n must be >= 2");
  const auto n_beamlets = static_cast<std::size_t>(std::floor(std::numbers::sqrt2 * static_cast<double>(n)));
  return build_geometry(n, n_angles, n_beamlets);
}

Geometry build_geometry(std::size_t n, std::size_t n_angles, std::size_t n_beamlets) {
  if (n < 2) throw InvalidParameter("build_geometry: n must be >= 2");
  if (n_angles < 1) throw InvalidParameter("build_geometry: need at least one angle");
  if (n_beamlets < 1) throw InvalidParameter("build_geometry: need at least one beamlet");

  Geometry g;
  g.n = n;
  g.n_angles = n_angles;
  g.n_beamlets = n_beamlets;
  g.spacing = std::numbers::sqrt2 * static_cast<double>(n) / static_cast<double>(n_beamlets);
  g.angles.resize(n_angles);
  for (std::size_t i = 0; i < n_angles; ++i) {
    g.angles[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_angles);
  }
  g.taus.resize(n_beamlets);
  const double mid = 0.5 * static_cast<double>(n_beamlets - 1);
  for (std::size_t k = 0; k < n_beamlets; ++k) {
    g.taus[k] = (static_cast<double>(k) - mid) * g.spacing;
  }
  return g;
}

Sinogram::Sinogram(std::size_t n_angles, std::size_t n_beamlets)
    : n_angles_(n_angles), n_beamlets_(n_beamlets), values_(n_angles * n_beamlets, 0.0) {}

Sinogram::Sinogram(std::size_t n_angles, std::size_t n_beamlets, std::vector<double> values)
    : n_angles_(n_angles), n_beamlets_(n_beamlets), values_(std::move(values)) {
  if (values_.size() != n_angles * n_beamlets) {
    throw DimensionMismatch("sinogram " + std::to_string(n_angles) + "x" + std::to_string(n_beamlets) +
                            " needs " + std::to_string(n_angles * n_beamlets) + " values, got " +
                            std::to_string(values_.size()));
  }
}

SystemMatrix::SystemMatrix(std::size_t n_angles, std::size_t n_beamlets, std::size_t cols,
                           std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> col_index,
                           std::vector<double> values)
    : n_angles_(n_angles),
      n_beamlets_(n_beamlets),
      rows_(n_angles * n_beamlets),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_index_(std::move(col_index)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.back() != values_.size() || col_index_.size() != values_.size()) {
    throw InvalidParameter("SystemMatrix: inconsistent CSR arrays");
  }
  if (rows_ > std::numeric_limits<std::uint32_t>::max()) throw InvalidParameter("SystemMatrix: too many rows");
  for (std::uint32_t c : col_index_) {
    if (c >= cols_) throw InvalidParameter("SystemMatrix: column index out of range");
  }
  // pixel-major copy for the transpose product and large-image forward product
  col_ptr_.assign(cols_ + 1, 0);
  for (std::uint32_t c : col_index_) ++col_ptr_[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) col_ptr_[c + 1] += col_ptr_[c];
  row_index_.resize(values_.size());
  col_values_.resize(values_.size());
  std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t at = fill[col_index_[k]]++;
      row_index_[at] = static_cast<std::uint32_t>(r);
      col_values_[at] = values_[k];
    }
  }
}

void SystemMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != cols_ || out.size() != rows_) throw DimensionMismatch("SystemMatrix::multiply");
  // Row gathers are fastest while the image stays cache resident; beyond
  // that, sweeping pixels in order and scattering into the (smaller)
  // sinogram wins.
  constexpr std::size_t kGatherMaxColumns = std::size_t{1} << 17;
  if (cols_ <= kGatherMaxColumns) {
    parallel_for(
        rows_,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t r = begin; r < end; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_index_[k]];
            out[r] = acc;
          }
        },
        256);
    return;
  }

  constexpr std::size_t kMinColumns = 4096;
  const std::size_t workers = std::clamp<std::size_t>(cols_ / kMinColumns, 1, thread_count());
  auto scatter = [&](std::size_t begin, std::size_t end, std::span<double> acc) {
    for (std::size_t c = begin; c < end; ++c) {
      const double xc = x[c];
      if (xc == 0.0) continue;
      for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) acc[row_index_[k]] += col_values_[k] * xc;
    }
  };
  std::fill(out.begin(), out.end(), 0.0);
  if (workers == 1) {
    scatter(0, cols_, out);
    return;
  }
  // one partial sinogram per worker, summed afterwards
  std::vector<std::vector<double>> partial(workers, std::vector<double>(rows_, 0.0));
  const std::size_t chunk = (cols_ + workers - 1) / workers;
  parallel_for(
      workers,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
          scatter(std::min(cols_, w * chunk), std::min(cols_, (w + 1) * chunk), partial[w]);
        }
      },
      1);
  for (const auto& p : partial) {
    for (std::size_t r = 0; r < rows_; ++r) out[r] += p[r];
  }
}

void SystemMatrix::multiply_transpose(std::span<const double> y, std::span<double> out) const {
  if (y.size() != rows_ || out.size() != cols_) throw DimensionMismatch("SystemMatrix::multiply_transpose");
  parallel_for(
      cols_,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          double acc = 0.0;
          for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) acc += col_values_[k] * y[row_index_[k]];
          out[c] = acc;
        }
      },
      4096);
}

std::vector<double> SystemMatrix::normal_diagonal() const {
  std::vector<double> diag(cols_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) diag[c] += col_values_[k] * col_values_[k];
  }
  return diag;
}

std::vector<RaySegment> trace_ray(std::size_t n, double theta, double tau) {
  constexpr double kParallelTol = 1e-14;
  constexpr double kMinLength = 1e-12;

  const double half = 0.5 * static_cast<double>(n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // Line: p(t) = tau (c, s) + t (-s, c)
  const double x0 = tau * c;
  const double y0 = tau * s;
  const double dx = std::abs(s) < kParallelTol ? 0.0 : -s;
  const double dy = std::abs(c) < kParallelTol ? 0.0 : c;

  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  auto clip = [&](double p0, double dp) {
    if (dp == 0.0) return p0 >= -half && p0 < half;
    double a = (-half - p0) / dp;
    double b = (half - p0) / dp;
    if (a > b) std::swap(a, b);
    t_min = std::max(t_min, a);
    t_max = std::min(t_max, b);
    return true;
  };
  if (!clip(x0, dx) || !clip(y0, dy) || t_max - t_min <= kMinLength) return {};

  std::vector<double> ts;
  ts.reserve(2 * n + 2);
  ts.push_back(t_min);
  for (std::size_t k = 1; k < n; ++k) {
    const double line = -half + static_cast<double>(k);
    if (dx != 0.0) {
      const double t = (line - x0) / dx;
      if (t > t_min && t < t_max) ts.push_back(t);
    }
    if (dy != 0.0) {
      const double t = (line - y0) / dy;
      if (t > t_min && t < t_max) ts.push_back(t);
    }
  }
  ts.push_back(t_max);
  std::sort(ts.begin(), ts.end());

  std::vector<RaySegment> segs;
  segs.reserve(ts.size());
  const auto last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double len = ts[k + 1] - ts[k];
    if (len <= kMinLength) continue;
    const double mid = 0.5 * (ts[k] + ts[k + 1]);
    const double px = x0 + mid * dx;
    const double py = y0 + mid * dy;
    const double col = std::clamp(std::floor(px + half), 0.0, last);
    const double row = std::clamp(std::floor(half - py), 0.0, last);
    const auto pixel = static_cast<std::uint32_t>(row * static_cast<double>(n) + col);
    if (!segs.empty() && segs.back().pixel == pixel) {
      segs.back().length += len;
    } else {
      segs.push_back({pixel, len});
    }
  }
  return segs;
}

SystemMatrix build_system_matrix(const Geometry& geom) {
  if (geom.pixels() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidParameter("build_system_matrix: grid too large");
  }
  std::vector<std::vector<RaySegment>> rays(geom.rows());
  parallel_for(
      geom.rows(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          const std::size_t a = r / geom.n_beamlets;
          const std::size_t k = r % geom.n_beamlets;
          rays[r] = trace_ray(geom.n, geom.angles[a], geom.taus[k]);
        }
      },
      32);

  std::vector<std::size_t> row_ptr(geom.rows() + 1, 0);
  for (std::size_t r = 0; r < rays.size(); ++r) row_ptr[r + 1] = row_ptr[r] + rays[r].size();
  std::vector<std::uint32_t> cols(row_ptr.back());
  std::vector<double> vals(row_ptr.back());
  for (std::size_t r = 0; r < rays.size(); ++r) {
    std::size_t at = row_ptr[r];
    for (const RaySegment& seg : rays[r]) {
      cols[at] = seg.pixel;
      vals[at] = seg.length;
      ++at;
    }
  }
  return SystemMatrix(geom.n_angles, geom.n_beamlets, geom.pixels(), std::move(row_ptr), std::move(cols), std::move(vals));
}

Sinogram forward(const SystemMatrix& L, std::span<const double> w) {
  if (w.size() != L.cols()) throw DimensionMismatch("forward: image size does not match system matrix");
  Sinogram out(L.n_angles(), L.n_beamlets());
  L.multiply(w, out.values());
  return out;
}

Sinogram forward(const SystemMatrix& L, const Image& w) { return forward(L, w.values()); }

std::vector<double> adjoint(const SystemMatrix& L, const Sinogram& s) {
  if (s.n_angles() != L.n_angles() || s.n_beamlets() != L.n_beamlets()) throw DimensionMismatch("adjoint: sinogram size does not match system matrix");
  std::vector<double> out(L.cols());
  L.multiply_transpose(s.values(), out);
  return out;
}

Cor DriftModel::cor_at(std::size_t angle) const {
  switch (kind) {
    case DriftKind::None:
      return {};
    case DriftKind::Single:
      return cors.at(0);
    case DriftKind::PerAngle:
      return cors.at(angle);
  }
  return {};
}

void DriftModel::validate(const Geometry& geom) const {
  switch (kind) {
    case DriftKind::None:
      if (!cors.empty()) throw InvalidParameter("drift 'none' carries no centers");
      break;
    case DriftKind::Single:
      if (cors.size() != 1) throw InvalidParameter("single drift needs exactly one center");
      break;
    case DriftKind::PerAngle:
      if (cors.size() != geom.n_angles) {
        throw InvalidParameter("per-angle drift needs " + std::to_string(geom.n_angles) + " centers, got " +
                               std::to_string(cors.size()));
      }
      break;
  }
  const double half = 0.5 * static_cast<double>(geom.n);
  for (const Cor& c : cors) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || std::abs(c.x) > half || std::abs(c.y) > half) {
      throw InvalidParameter("center of rotation outside the field of view");
    }
  }
}

Sinogram simulate_shifted(const Geometry& geom, const Image& w, const DriftModel& drift, std::size_t oversample) {
  if (w.n() != geom.n) throw DimensionMismatch("simulate_shifted: image does not match geometry");
  if (oversample == 0) throw InvalidParameter("simulate_shifted: oversample must be >= 1");
  drift.validate(geom);

  Sinogram out(geom);
  const auto values = w.values();
  const auto os = static_cast<double>(oversample);
  parallel_for(
      geom.rows(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          const std::size_t a = r / geom.n_beamlets;
          const std::size_t k = r % geom.n_beamlets;
          const Cor cor = drift.cor_at(a);
          const double p = shift_amount(geom.angles[a], cor.x, cor.y);
          double total = 0.0;
          for (std::size_t sub = 0; sub < oversample; ++sub) {
            const double offset = ((static_cast<double>(sub) + 0.5) / os - 0.5) * geom.spacing;
            double acc = 0.0;
            for (const RaySegment& seg : trace_ray(geom.n, geom.angles[a], geom.taus[k] + offset + p)) {
              acc += seg.length * values[seg.pixel];
            }
            total += acc;
          }
          out.values()[r] = total / os;
        }
      },
      32);
  return out;
}

}  // namespace tomocor
