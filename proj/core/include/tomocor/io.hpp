#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tomocor/image.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/solver.hpp"

namespace tomocor::io {

inline constexpr std::uint32_t kFormatVersion = 1;

// Binary layout shared by all three kinds (little-endian throughout):
//   bytes 0..3    magic "CTI1" | "CTS1" | "CTD1"
//   bytes 4..7    uint32 version (1)
//   bytes 8..11   uint32 dim0
//   bytes 12..15  uint32 dim1
//   bytes 16..    dim0 * dim1 IEEE-754 binary64 values, row-major
// Image: dims (n, n). Sinogram: (n_angles, n_beamlets). Drift: (count, 2)
// with rows (x*, y*); count 0 = no drift, 1 = single CoR, otherwise one per angle.

enum class FileKind { Image, Sinogram, Drift };

/// Kind of a binary file from its magic. Throws IoError (OpenFailed, BadMagic).
FileKind peek_kind(const std::filesystem::path& path);

void write_image(const std::filesystem::path& path, const Image& image);
Image read_image(const std::filesystem::path& path);

void write_sinogram(const std::filesystem::path& path, const Sinogram& sinogram);
Sinogram read_sinogram(const std::filesystem::path& path);

void write_drift(const std::filesystem::path& path, const DriftModel& drift);
DriftModel read_drift(const std::filesystem::path& path);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples as the format
/// requires). normalize maps [min, max] linearly onto [0, 65535]; otherwise
/// values are rounded and clamped to [0, 65535].
void export_pgm(const Image& image, const std::filesystem::path& path, bool normalize);

/// One row of an optimization log.
struct LogRecord {
  std::size_t iter = 0;
  double phi = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t inner_iters = 0;
  double step = 0.0;
  std::size_t fg_evals = 0;
  double wall_ms = 0.0;
  std::optional<double> ssim;

  static LogRecord from(const IterationRecord& r, std::optional<double> ssim = std::nullopt);
};

inline constexpr const char* kLogHeader = "iter,phi,grad_inf_norm,inner_iters,step,fg_evals,wall_ms,ssim";

/// Appends one record; writes `comments` (each prefixed with "# ") and the
/// header first when the file is new or empty.
void append_log_row(const std::filesystem::path& csv_path, const LogRecord& record,
                    const std::vector<std::string>& comments = {});

/// Parses a log written by append_log_row (comment lines skipped).
std::vector<LogRecord> read_log(const std::filesystem::path& csv_path);

}  // namespace tomocor::io
