#include "tomocor/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tomocor/error.hpp"

namespace tomocor {

const char* to_string(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::OpenFailed: return "open failed";
    case IoErrorKind::WriteFailed: return "write failed";
    case IoErrorKind::BadMagic: return "bad magic";
    case IoErrorKind::UnsupportedVersion: return "unsupported version";
    case IoErrorKind::Truncated: return "truncated";
    case IoErrorKind::DimensionOverflow: return "dimension overflow";
    case IoErrorKind::Malformed: return "malformed";
  }
  return "io error";
}

namespace io {

namespace {

constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& buf, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::OpenFailed, path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError(IoErrorKind::WriteFailed, path.string());
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::OpenFailed, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix(const std::filesystem::path& path, const char* magic, std::uint32_t dim0, std::uint32_t dim1,
                  std::span<const double> values) {
  std::string buf;
  buf.reserve(kHeaderBytes + values.size() * 8);
  buf.append(magic, 4);
  put_u32(buf, kFormatVersion);
  put_u32(buf, dim0);
  put_u32(buf, dim1);
  for (double v : values) put_f64(buf, v);
  write_bytes(path, buf);
}

std::uint32_t checked_dim(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw IoError(IoErrorKind::DimensionOverflow, what);
  return static_cast<std::uint32_t>(v);
}

struct Matrix {
  std::uint32_t dim0 = 0;
  std::uint32_t dim1 = 0;
  std::vector<double> values;
};

Matrix read_matrix(const std::filesystem::path& path, const char* magic) {
  const std::string bytes = read_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw IoError(IoErrorKind::BadMagic, path.string() + " (expected " + std::string(magic, 4) + ")");
  }
  if (bytes.size() < kHeaderBytes) throw IoError(IoErrorKind::Truncated, path.string() + ": short header");
  const auto version = static_cast<std::uint32_t>(get_le(p + 4, 4));
  if (version != kFormatVersion) {
    throw IoError(IoErrorKind::UnsupportedVersion, path.string() + ": version " + std::to_string(version));
  }
  Matrix m;
  m.dim0 = static_cast<std::uint32_t>(get_le(p + 8, 4));
  m.dim1 = static_cast<std::uint32_t>(get_le(p + 12, 4));
  const std::uint64_t count = static_cast<std::uint64_t>(m.dim0) * m.dim1;
  if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 8 ||
      count > std::numeric_limits<std::size_t>::max() / 8) {
    throw IoError(IoErrorKind::DimensionOverflow, path.string());
  }
  const std::uint64_t need = kHeaderBytes + count * 8;
  if (bytes.size() < need) throw IoError(IoErrorKind::Truncated, path.string());
  if (bytes.size() > need) throw IoError(IoErrorKind::Malformed, path.string() + ": trailing bytes");
  m.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) m.values[i] = std::bit_cast<double>(get_le(p + kHeaderBytes + 8 * i, 8));
  return m;
}

}  // namespace

FileKind peek_kind(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::OpenFailed, path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4)) throw IoError(IoErrorKind::BadMagic, path.string());
  const std::string m(magic.data(), 4);
  if (m == "CTI1") return FileKind::Image;
  if (m == "CTS1") return FileKind::Sinogram;
  if (m == "CTD1") return FileKind::Drift;
  throw IoError(IoErrorKind::BadMagic, path.string());
}

void write_image(const std::filesystem::path& path, const Image& image) {
  const auto n = checked_dim(image.n(), "image side");
  write_matrix(path, "CTI1", n, n, image.values());
}

Image read_image(const std::filesystem::path& path) {
  Matrix m = read_matrix(path, "CTI1");
  if (m.dim0 != m.dim1) throw IoError(IoErrorKind::Malformed, path.string() + ": image is not square");
  try {
    return Image(m.dim0, std::move(m.values));
  } catch (const std::invalid_argument& e) {
    throw IoError(IoErrorKind::Malformed, path.string() + ": " + e.what());
  }
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& sinogram) {
  write_matrix(path, "CTS1", checked_dim(sinogram.n_angles(), "angles"), checked_dim(sinogram.n_beamlets(), "beamlets"),
               sinogram.values());
}

Sinogram read_sinogram(const std::filesystem::path& path) {
  Matrix m = read_matrix(path, "CTS1");
  if (m.dim0 == 0 || m.dim1 == 0) throw IoError(IoErrorKind::Malformed, path.string() + ": empty sinogram");
  for (double v : m.values) {
    if (!std::isfinite(v)) throw IoError(IoErrorKind::Malformed, path.string() + ": non-finite sample");
  }
  return Sinogram(m.dim0, m.dim1, std::move(m.values));
}

void write_drift(const std::filesystem::path& path, const DriftModel& drift) {
  std::vector<double> flat;
  if (drift.kind != DriftKind::None) {
    for (const Cor& c : drift.cors) {
      flat.push_back(c.x);
      flat.push_back(c.y);
    }
  }
  // a per-angle model with a single angle would read back as single
  write_matrix(path, "CTD1", checked_dim(flat.size() / 2, "drift count"), 2, flat);
}

DriftModel read_drift(const std::filesystem::path& path) {
  Matrix m = read_matrix(path, "CTD1");
  if (m.dim1 != 2) throw IoError(IoErrorKind::Malformed, path.string() + ": drift rows must have 2 columns");
  std::vector<Cor> cors;
  for (std::size_t i = 0; i < m.dim0; ++i) {
    const double x = m.values[2 * i];
    const double y = m.values[2 * i + 1];
    if (!std::isfinite(x) || !std::isfinite(y)) throw IoError(IoErrorKind::Malformed, path.string() + ": non-finite CoR");
    cors.push_back({x, y});
  }
  if (cors.empty()) return DriftModel::none();
  if (cors.size() == 1) return DriftModel::single(cors.front());
  return DriftModel::per_angle(std::move(cors));
}

void export_pgm(const Image& image, const std::filesystem::path& path, bool normalize) {
  const double lo = image.min();
  const double hi = image.max();
  std::string buf = "P5\n" + std::to_string(image.n()) + " " + std::to_string(image.n()) + "\n65535\n";
  for (double v : image.values()) {
    double level = v;
    if (normalize) level = hi > lo ? (v - lo) / (hi - lo) * 65535.0 : 0.0;
    const auto s = static_cast<std::uint16_t>(std::clamp(std::round(level), 0.0, 65535.0));
    buf.push_back(static_cast<char>(s >> 8));
    buf.push_back(static_cast<char>(s & 0xffu));
  }
  write_bytes(path, buf);
}

LogRecord LogRecord::from(const IterationRecord& r, std::optional<double> ssim) {
  LogRecord rec;
  rec.iter = r.iter;
  rec.phi = r.phi;
  rec.grad_inf_norm = r.grad_inf_norm;
  rec.inner_iters = r.inner_iters;
  rec.step = r.step;
  rec.fg_evals = r.fg_evals;
  rec.wall_ms = r.wall_ms;
  rec.ssim = ssim;
  return rec;
}

void append_log_row(const std::filesystem::path& csv_path, const LogRecord& record,
                    const std::vector<std::string>& comments) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(csv_path, ec) || std::filesystem::file_size(csv_path, ec) == 0;
  std::ofstream out(csv_path, std::ios::app);
  if (!out) throw IoError(IoErrorKind::OpenFailed, csv_path.string());
  if (fresh) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << kLogHeader << '\n';
  }
  out << std::setprecision(17) << record.iter << ',' << record.phi << ',' << record.grad_inf_norm << ','
      << record.inner_iters << ',' << record.step << ',' << record.fg_evals << ',' << record.wall_ms << ',';
  if (record.ssim) out << *record.ssim;
  out << '\n';
  if (!out) throw IoError(IoErrorKind::WriteFailed, csv_path.string());
}

std::vector<LogRecord> read_log(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError(IoErrorKind::OpenFailed, csv_path.string());
  std::vector<LogRecord> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kLogHeader) throw IoError(IoErrorKind::Malformed, csv_path.string() + ": unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) throw IoError(IoErrorKind::Malformed, csv_path.string() + ": bad row '" + line + "'");
    try {
      LogRecord r;
      r.iter = std::stoull(fields[0]);
      r.phi = std::stod(fields[1]);
      r.grad_inf_norm = std::stod(fields[2]);
      r.inner_iters = std::stoull(fields[3]);
      r.step = std::stod(fields[4]);
      r.fg_evals = std::stoull(fields[5]);
      r.wall_ms = std::stod(fields[6]);
      if (!fields[7].empty()) r.ssim = std::stod(fields[7]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError(IoErrorKind::Malformed, csv_path.string() + ": bad number in '" + line + "'");
    }
  }
  return rows;
}

}  // namespace io
}  // namespace tomocor
