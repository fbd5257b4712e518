#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomocor/baselines.hpp"
#include "tomocor/image.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/shift.hpp"
#include "tomocor/solver.hpp"

namespace tomocor {

enum class Mode { Standard, Explicit, Implicit, L2, Tv, Mirror, Alternating };

const char* to_string(Mode mode);
/// Throws InvalidParameter on unknown names.
Mode parse_mode(std::string_view name);

struct ReconstructionOptions {
  Mode mode = Mode::Standard;
  double sigma = default_sigma();
  double lambda = 0.0;
  double tv_eps = 1e-6;
  /// Starting value of every shift / CoR coordinate.
  double init_shift = 0.0;
  /// Explicit mode: recover one CoR per angle instead of a single one.
  bool per_angle_cor = false;
  /// Explicit mode: skip CoR recovery and align with these centers.
  std::optional<std::vector<Cor>> known_cor;
  SolverConfig solver;
  AlternatingConfig alternating;
  IterationObserver observer;
};

struct ReconstructionResult {
  Image image;
  /// The data the final image was fitted to (drift-corrected where the mode corrects).
  Sinogram aligned;
  std::optional<std::vector<Cor>> cors;
  std::optional<ShiftParams> shifts;
  std::optional<SolverReport> report;
  std::optional<MirrorResult> mirror;
  std::optional<AlternatingResult> alternating;
};

/// Runs one reconstruction pipeline from W = 0 and zero (or init_shift) drift
/// parameters.
ReconstructionResult reconstruct(const Geometry& geom, const SystemMatrix& L, const Sinogram& d,
                                 const ReconstructionOptions& opts);

/// Jacobi preconditioner used by every pipeline: diag(L^T L) on the image
/// block (1 where a pixel is never hit) and `aux_scale` on the remaining coordinates.
std::vector<double> default_preconditioner(const SystemMatrix& L, std::size_t dimension, double aux_scale = 1.0);

}  // namespace tomocor
