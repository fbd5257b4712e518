#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <iterator>
#include <random>

#include "tomocor/error.hpp"
#include "tomocor/io.hpp"
#include "tomocor/objective.hpp"
#include "tomocor/phantoms.hpp"

using namespace tomocor;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tomocor_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const char* name) const { return dir_ / name; }

  static std::vector<unsigned char> bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  static void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }

  fs::path dir_;
};

Image random_image(std::size_t n) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n * n);
  for (double& x : v) x = u(gen);
  return Image(n, std::move(v));
}

IoErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const IoError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no IoError thrown";
  return IoErrorKind::OpenFailed;
}

}  // namespace

TEST_F(IoTest, ImageRoundTripIsBitIdentical) {
  const Image w = random_image(16);
  io::write_image(path("w.cti"), w);
  EXPECT_EQ(io::read_image(path("w.cti")), w);
  EXPECT_EQ(fs::file_size(path("w.cti")), 16u + 16 * 16 * 8);
  EXPECT_EQ(io::peek_kind(path("w.cti")), io::FileKind::Image);
}

TEST_F(IoTest, SinogramAndDriftRoundTrip) {
  Sinogram s(3, 5);
  for (std::size_t i = 0; i < s.size(); ++i) s.values()[i] = 0.1 * i - 0.3;
  io::write_sinogram(path("s.cts"), s);
  EXPECT_EQ(io::read_sinogram(path("s.cts")), s);
  EXPECT_EQ(io::peek_kind(path("s.cts")), io::FileKind::Sinogram);
  for (const DriftModel& d : {DriftModel::none(), DriftModel::single({1.5, -2.25}),
                              DriftModel::per_angle({{0, 0}, {1, 2}, {3, 4}})}) {
    io::write_drift(path("d.ctd"), d);
    EXPECT_EQ(io::read_drift(path("d.ctd")), d);
  }
}

TEST_F(IoTest, CorruptMagicIsRejected) {
  io::write_image(path("w.cti"), random_image(4));
  auto b = bytes(path("w.cti"));
  b[0] = 'X';
  write_bytes(path("w.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("w.cti")); }), IoErrorKind::BadMagic);
}

TEST_F(IoTest, KindMismatchIsBadMagic) {
  io::write_sinogram(path("s.cts"), Sinogram(2, 2));
  EXPECT_EQ(kind_of([&] { io::read_image(path("s.cts")); }), IoErrorKind::BadMagic);
}

TEST_F(IoTest, StructuralErrors) {
  io::write_image(path("w.cti"), random_image(4));
  const auto good = bytes(path("w.cti"));

  auto b = good;
  b.resize(good.size() - 8);
  write_bytes(path("short.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("short.cti")); }), IoErrorKind::Truncated);

  write_bytes(path("tiny.cti"), {'C', 'T', 'I', '1', 1});
  EXPECT_EQ(kind_of([&] { io::read_image(path("tiny.cti")); }), IoErrorKind::Truncated);

  b = good;
  b[4] = 9;
  write_bytes(path("ver.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("ver.cti")); }), IoErrorKind::UnsupportedVersion);

  b = good;
  b.push_back(0);
  write_bytes(path("long.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("long.cti")); }), IoErrorKind::Malformed);

  b = good;
  for (int i = 8; i < 16; ++i) b[i] = 0xff;
  write_bytes(path("huge.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("huge.cti")); }), IoErrorKind::DimensionOverflow);

  b = good;
  b[16 + 7] = 0xbf;  // first pixel becomes negative
  write_bytes(path("neg.cti"), b);
  EXPECT_EQ(kind_of([&] { io::read_image(path("neg.cti")); }), IoErrorKind::Malformed);

  EXPECT_EQ(kind_of([&] { io::read_image(path("absent.cti")); }), IoErrorKind::OpenFailed);
}

TEST_F(IoTest, PgmWithoutNormalizationRounds) {
  io::export_pgm(Image(3, std::vector<double>(9, 7.6)), path("c.pgm"), false);
  const auto b = bytes(path("c.pgm"));
  const std::string header = "P5\n3 3\n65535\n";
  ASSERT_EQ(b.size(), header.size() + 18);
  for (std::size_t i = header.size(); i < b.size(); i += 2) {
    EXPECT_EQ(b[i], 0);
    EXPECT_EQ(b[i + 1], 8);
  }
}

TEST_F(IoTest, PgmNormalizationSpansFullRange) {
  io::export_pgm(make_shepp_logan(16), path("s.pgm"), true);
  const auto b = bytes(path("s.pgm"));
  const std::size_t off = std::string("P5\n16 16\n65535\n").size();
  unsigned lo = 65535, hi = 0;
  for (std::size_t i = off; i < b.size(); i += 2) {
    const unsigned v = (b[i] << 8) | b[i + 1];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, 0u);
  EXPECT_EQ(hi, 65535u);
}

// 2x2 image [[0, 1], [2, 4]] normalized: 0, 16384 (rounded 16383.75), 32768 (32767.5), 65535.
TEST_F(IoTest, PgmKnownByteStream) {
  io::export_pgm(Image(2, {0.0, 1.0, 2.0, 4.0}), path("k.pgm"), true);
  const std::string header = "P5\n2 2\n65535\n";
  std::vector<unsigned char> expected(header.begin(), header.end());
  for (unsigned char c : {0x00, 0x00, 0x40, 0x00, 0x80, 0x00, 0xff, 0xff}) expected.push_back(c);
  EXPECT_EQ(bytes(path("k.pgm")), expected);
}

TEST_F(IoTest, LogAppendsRowsUnderOneHeader) {
  io::LogRecord a{0, 12.5, 3.0, 0, 0.0, 1, 0.1, std::nullopt};
  io::LogRecord b{1, 3.25, 0.5, 7, 1.0, 9, 2.5, 0.875};
  io::append_log_row(path("log.csv"), a, {"mode=explicit"});
  io::append_log_row(path("log.csv"), b, {"mode=explicit"});
  std::ifstream in(path("log.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "# mode=explicit");
  EXPECT_EQ(lines[1], io::kLogHeader);
  const auto back = io::read_log(path("log.csv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].phi, 12.5);
  EXPECT_FALSE(back[0].ssim);
  EXPECT_EQ(back[1].inner_iters, 7u);
  EXPECT_EQ(back[1].fg_evals, 9u);
  EXPECT_EQ(back[1].wall_ms, 2.5);
  EXPECT_EQ(back[1].ssim, 0.875);
}

TEST_F(IoTest, SolverLogHasMonotoneWallTime) {
  const std::size_t n = 16;
  const Geometry g = build_geometry(n, 12);
  const SystemMatrix L = build_system_matrix(g);
  const Sinogram d = forward(L, make_disk(n, 0.5, 1.0));
  StandardObjective obj(L, d);
  const std::vector<double> x0(n * n, 0.0), lower(n * n, 0.0);
  SolverConfig cfg;
  cfg.max_outer = 15;
  tn_minimize(obj.as_function(), x0, lower, cfg, {},
              [&](const IterationRecord& r, std::span<const double>) {
                io::append_log_row(path("run.csv"), io::LogRecord::from(r));
              });
  const auto rows = io::read_log(path("run.csv"));
  ASSERT_GE(rows.size(), 2u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].wall_ms, rows[i - 1].wall_ms);
    EXPECT_EQ(rows[i].iter, i);
  }
}
