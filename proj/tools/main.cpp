// tomocor: simulate drifted sinograms, reconstruct, and run the small studies.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tomocor/tomocor.hpp"

namespace fs = std::filesystem;
using namespace tomocor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "key=value" lines of every option of the subcommand, for CSV headers.
std::vector<std::string> flag_echo(const CLI::App& cmd) {
  std::vector<std::string> lines{"tomocor " + cmd.get_name()};
  std::istringstream cfg(cmd.config_to_str(true, false));
  std::string line;
  while (std::getline(cfg, line)) {
    if (!line.empty() && line.front() != '[' && line.front() != '#') lines.push_back(line);
  }
  return lines;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& comments, const std::string& header)
      : out_(path) {
    if (!out_) throw IoError(IoErrorKind::OpenFailed, path.string());
    for (const auto& c : comments) out_ << "# " << c << '\n';
    out_ << header << '\n';
    out_.precision(10);
  }
  std::ostream& row() { return out_; }
  void close() {
    out_.close();
    if (out_.fail()) throw IoError(IoErrorKind::WriteFailed, "csv output");
  }

 private:
  std::ofstream out_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoErrorKind::OpenFailed, dir.string() + ": " + ec.message());
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " must not be empty");
  return out;
}

void write_shift_csv(const fs::path& path, const Geometry& geom, std::span<const double> shifts,
                     const DriftModel* drift, const std::vector<std::string>& comments) {
  CsvFile csv(path, comments, drift ? "angle,theta,x_star,y_star,shift" : "angle,theta,shift");
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    csv.row() << a << ',' << geom.angles[a] << ',';
    if (drift) {
      const Cor c = drift->cor_at(a);
      csv.row() << c.x << ',' << c.y << ',';
    }
    csv.row() << shifts[a] << '\n';
  }
  csv.close();
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
  std::string phantom = "disk";
  std::string phantom_file;
  std::size_t n = 128;
  std::size_t angles = 30;
  double radius = 0.05;
  double value = 1.0;
  std::string drift = "none";
  double drift_scale = 0.02;
  double drift_angle = 0.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
  std::size_t oversample = 1;
  std::string out;
};

int run_simulate(const SimulateFlags& f, const CLI::App& cmd) {
  Image truth;
  if (f.phantom == "disk") {
    truth = make_disk(f.n, f.radius, f.value);
  } else if (f.phantom == "shepp-logan") {
    truth = make_shepp_logan(f.n);
  } else {
    if (f.phantom_file.empty()) throw UsageError("--phantom file needs --phantom-file");
    truth = io::read_image(f.phantom_file);
  }
  const Geometry geom = build_geometry(truth.n(), f.angles);
  DriftModel drift;
  if (f.drift == "single") {
    drift = make_single_drift(truth.n(), f.drift_scale, f.drift_angle);
  } else if (f.drift == "walk") {
    drift = make_random_walk_drift(geom, f.drift_scale, f.seed);
  }
  const NoiseSpec noise{f.noise, f.noise_seed};
  Scenario sc = make_scenario(std::move(truth), f.angles, drift, noise, f.oversample);

  const fs::path out(f.out);
  ensure_dir(out);
  io::write_image(out / "truth.cti", sc.truth);
  io::export_pgm(sc.truth, out / "truth.pgm", true);
  io::write_drift(out / "drift.ctd", sc.drift);
  io::write_sinogram(out / "sinogram.cts", sc.measured);
  io::write_sinogram(out / "drift_free.cts", sc.drift_free);
  const ShiftParams p = ShiftParams::from_drift(sc.geom, sc.drift);
  write_shift_csv(out / "drift.csv", sc.geom, p.values, &sc.drift, flag_echo(cmd));
  std::cout << "wrote " << out.string() << ": n=" << sc.geom.n << " angles=" << sc.geom.n_angles
            << " beamlets=" << sc.geom.n_beamlets << " rel_misfit(measured, drift_free)="
            << rel_misfit(sc.measured, sc.drift_free).value << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructFlags {
  std::string mode = "standard";
  std::string sino;
  std::size_t n = 0;
  double sigma = default_sigma();
  std::optional<double> lambda;
  double tv_eps = 1e-6;
  double init_shift = 0.0;
  bool per_angle_cor = false;
  std::string known_cor;
  std::string known_cor_file;
  double grad_tol = 1e-5;
  std::size_t max_outer = 500;
  std::size_t max_inner = 50;
  std::size_t rounds = 10;
  std::size_t round_iters = 10;
  std::size_t upsample = 10;
  std::string truth;
  std::string out;
  std::string log;
};

int run_reconstruct(const ReconstructFlags& f, const CLI::App& cmd) {
  ReconstructionOptions opts;
  opts.mode = parse_mode(f.mode);
  const bool regularized = opts.mode == Mode::L2 || opts.mode == Mode::Tv;
  if (f.lambda && !regularized) throw UsageError("--lambda only applies to modes l2 and tv");
  if (regularized && !f.lambda) throw UsageError("modes l2 and tv need --lambda");
  if ((!f.known_cor.empty() || !f.known_cor_file.empty()) && opts.mode != Mode::Explicit) {
    throw UsageError("--known-cor only applies to mode explicit");
  }
  if (f.per_angle_cor && opts.mode != Mode::Explicit) throw UsageError("--per-angle-cor only applies to mode explicit");

  const Sinogram d = io::read_sinogram(f.sino);
  const std::size_t n = f.n != 0 ? f.n : grid_for_beamlets(d.n_beamlets());
  const Geometry geom = build_geometry(n, d.n_angles());
  if (!d.matches(geom)) throw UsageError("sinogram shape does not match --n");
  const SystemMatrix L = build_system_matrix(geom);

  opts.sigma = f.sigma;
  opts.lambda = f.lambda.value_or(0.0);
  opts.tv_eps = f.tv_eps;
  opts.init_shift = f.init_shift;
  opts.per_angle_cor = f.per_angle_cor;
  opts.solver.grad_tol = f.grad_tol;
  opts.solver.max_outer = f.max_outer;
  opts.solver.max_inner = f.max_inner;
  opts.alternating.outer_rounds = f.rounds;
  opts.alternating.recon_iterations_per_round = f.round_iters;
  opts.alternating.upsample_factor = f.upsample;
  opts.alternating.solver = opts.solver;
  if (!f.known_cor.empty()) {
    const auto xy = parse_list<double>(f.known_cor, "--known-cor");
    if (xy.size() != 2) throw UsageError("--known-cor expects x,y");
    opts.known_cor = std::vector<Cor>{{xy[0], xy[1]}};
  } else if (!f.known_cor_file.empty()) {
    const DriftModel known = io::read_drift(f.known_cor_file);
    if (known.kind == DriftKind::None) throw UsageError("--known-cor-file holds no CoR");
    opts.known_cor = known.cors;
  }

  std::optional<Image> truth;
  if (!f.truth.empty()) {
    truth = io::read_image(f.truth);
    if (truth->n() != n) throw UsageError("--truth size does not match the sinogram grid");
  }
  const std::vector<std::string> comments = flag_echo(cmd);
  if (!f.log.empty()) {
    if (fs::path(f.log).has_parent_path()) ensure_dir(fs::path(f.log).parent_path());
    std::error_code ec;
    fs::remove(f.log, ec);
    opts.observer = [&](const IterationRecord& rec, std::span<const double> x) {
      std::optional<double> s;
      if (truth) s = ssim(*truth, Image(n, std::vector<double>(x.begin(), x.begin() + static_cast<long>(n * n))));
      io::append_log_row(f.log, io::LogRecord::from(rec, s), comments);
    };
  }

  const ReconstructionResult res = reconstruct(geom, L, d, opts);
  if (res.report && res.report->reason == Termination::NonFiniteStart) {
    std::cerr << "error: objective is not finite at the starting point\n";
    return kExitNumerical;
  }

  const fs::path out(f.out);
  ensure_dir(out);
  io::write_image(out / "recon.cti", res.image);
  io::export_pgm(res.image, out / "recon.pgm", true);
  io::write_sinogram(out / "aligned.cts", res.aligned);
  std::optional<DriftModel> cors;
  if (res.cors) {
    cors = res.cors->size() == 1 ? DriftModel::single(res.cors->front()) : DriftModel::per_angle(*res.cors);
    io::write_drift(out / "drift.ctd", *cors);
  }
  if (res.shifts) write_shift_csv(out / "shifts.csv", geom, res.shifts->values, cors ? &*cors : nullptr, comments);

  std::cout.precision(12);
  std::cout << "mode=" << to_string(opts.mode);
  if (res.report) {
    std::cout << " reason=" << to_string(res.report->reason) << " iterations=" << res.report->iterates.size() - 1
              << " phi=" << res.report->phi << " grad_inf=" << res.report->grad_inf_norm;
  }
  if (res.cors && res.cors->size() == 1) std::cout << " cor=(" << res.cors->front().x << "," << res.cors->front().y << ")";
  if (res.mirror) std::cout << " mirror_offset=" << res.mirror->offset;
  if (truth) std::cout << " ssim=" << ssim(*truth, res.image);
  std::cout << '\n';
  if (res.mirror && res.mirror->pair_warning) std::cerr << "warning: no projection pair within pi +- 2pi/N_theta\n";
  if (res.alternating && !res.alternating->clamped_angles.empty()) {
    std::cerr << "warning: " << res.alternating->clamped_angles.size() << " correlation shifts were clamped\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- sweep-sigma

struct SweepFlags {
  std::string ntau_list = "91,181,362";
  std::string sigma_range = "0.05:2:20";
  std::string phantom = "shepp-logan";
  std::string out;
};

int run_sweep(const SweepFlags& f, const CLI::App& cmd) {
  const auto ntau = parse_list<std::size_t>(f.ntau_list, "--ntau-list");
  std::vector<double> range;
  {
    std::string text = f.sigma_range;
    for (char& c : text) c = c == ':' ? ',' : c;
    range = parse_list<double>(text, "--sigma-range");
  }
  if (range.size() != 3 || range[2] < 2 || std::floor(range[2]) != range[2]) {
    throw UsageError("--sigma-range expects lo:hi:count with count >= 2");
  }
  const auto sigmas = log_spaced(range[0], range[1], static_cast<std::size_t>(range[2]));
  const auto points = sweep_sigma(parse_sweep_phantom(f.phantom), ntau, sigmas);

  std::ostringstream body;
  body.precision(10);
  for (const auto& p : points) body << p.n_beamlets << ',' << p.sigma << ',' << p.error << '\n';
  if (f.out.empty()) {
    std::cout << "n_tau,sigma,error\n" << body.str();
  } else {
    CsvFile csv(f.out, flag_echo(cmd), "n_tau,sigma,error");
    csv.row() << body.str();
    csv.close();
  }
  return kExitOk;
}

// ----------------------------------------------------------------- metrics

struct MetricsFlags {
  std::string ref;
  std::string test;
  std::string csv;
};

int run_metrics(const MetricsFlags& f, const CLI::App& cmd) {
  const io::FileKind kind = io::peek_kind(f.ref);
  if (io::peek_kind(f.test) != kind) throw UsageError("--ref and --test hold different kinds of data");
  std::string metric;
  double value = 0.0;
  if (kind == io::FileKind::Image) {
    const Image ref = io::read_image(f.ref);
    const Image test = io::read_image(f.test);
    if (ref.n() != test.n()) throw UsageError("images differ in size");
    metric = "ssim";
    value = ssim(ref, test);
  } else if (kind == io::FileKind::Sinogram) {
    const Sinogram ref = io::read_sinogram(f.ref);
    const Sinogram test = io::read_sinogram(f.test);
    if (ref.n_angles() != test.n_angles() || ref.n_beamlets() != test.n_beamlets()) {
      throw UsageError("sinograms differ in shape");
    }
    metric = "rel_misfit";
    // misfit of the test data relative to the reference
    value = rel_misfit(test, ref).value;
  } else {
    throw UsageError("metrics compare images or sinograms, not drift files");
  }
  std::cout.precision(12);
  std::cout << metric << ' ' << value << '\n';
  if (!f.csv.empty()) {
    const bool fresh = !fs::exists(f.csv) || fs::file_size(f.csv) == 0;
    std::ofstream out(f.csv, std::ios::app);
    if (!out) throw IoError(IoErrorKind::OpenFailed, f.csv);
    if (fresh) {
      for (const auto& c : flag_echo(cmd)) out << "# " << c << '\n';
      out << "ref,test,metric,value\n";
    }
    out.precision(12);
    out << f.ref << ',' << f.test << ',' << metric << ',' << value << '\n';
    if (!out) throw IoError(IoErrorKind::WriteFailed, f.csv);
  }
  return kExitOk;
}

// ------------------------------------------------------------------- bench

struct BenchFlags {
  std::string n_list = "64,128,256,512";
  std::size_t reps = 5;
  std::size_t angles = 1;
  std::string out;
};

int run_bench(const BenchFlags& f, const CLI::App& cmd) {
  const auto sizes = parse_list<std::size_t>(f.n_list, "--n-list");
  std::ostringstream body;
  body.precision(6);
  for (std::size_t n : sizes) {
    const EvaluationTiming t = time_implicit_evaluation(n, f.angles, f.reps);
    body << n << ',' << f.angles << ',' << t.median_ms << '\n';
  }
  if (f.out.empty()) {
    std::cout << "n,n_angles,ms\n" << body.str();
  } else {
    CsvFile csv(f.out, flag_echo(cmd), "n,n_angles,ms");
    csv.row() << body.str();
    csv.close();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-beam tomography with center-of-rotation drift correction"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a phantom, a drift model and the measured sinogram");
  c_sim->add_option("--phantom", sim.phantom)->check(CLI::IsMember({"disk", "shepp-logan", "file"}))->capture_default_str();
  c_sim->add_option("--phantom-file", sim.phantom_file, "Image (.cti) used with --phantom file");
  c_sim->add_option("--n", sim.n, "Grid side")->check(CLI::Range(2, 4096))->capture_default_str();
  c_sim->add_option("--angles", sim.angles, "Number of projection angles")->check(CLI::Range(1, 100000))->capture_default_str();
  c_sim->add_option("--radius", sim.radius, "Disk radius as a fraction of n/2")->capture_default_str();
  c_sim->add_option("--value", sim.value, "Disk intensity")->capture_default_str();
  c_sim->add_option("--drift", sim.drift)->check(CLI::IsMember({"none", "single", "walk"}))->capture_default_str();
  c_sim->add_option("--drift-scale", sim.drift_scale, "CoR distance (single) or max step (walk) as a fraction of n")->capture_default_str();
  c_sim->add_option("--drift-angle", sim.drift_angle, "Direction of the single CoR in radians")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Random-walk seed")->capture_default_str();
  c_sim->add_option("--noise", sim.noise, "Noise std as a fraction of rms(sinogram)")->capture_default_str();
  c_sim->add_option("--noise-seed", sim.noise_seed)->capture_default_str();
  c_sim->add_option("--oversample", sim.oversample, "Sub-rays per beamlet")->check(CLI::Range(1, 64))->capture_default_str();
  c_sim->add_option("--out", sim.out, "Output directory")->required();

  ReconstructFlags rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Reconstruct an image (and drift) from a sinogram");
  c_rec->add_option("--mode", rec.mode)
      ->check(CLI::IsMember({"standard", "explicit", "implicit", "l2", "tv", "mirror", "alternating"}))
      ->capture_default_str();
  c_rec->add_option("--sino", rec.sino, "Measured sinogram (.cts)")->required();
  c_rec->add_option("--n", rec.n, "Grid side (default: inferred from the beamlet count)");
  c_rec->add_option("--sigma", rec.sigma, "Gaussian kernel width in pixels")->capture_default_str();
  c_rec->add_option("--lambda", rec.lambda, "Regularization weight (l2, tv)");
  c_rec->add_option("--tv-eps", rec.tv_eps, "TV smoothing")->capture_default_str();
  c_rec->add_option("--init-shift", rec.init_shift, "Initial value of every shift / CoR coordinate")->capture_default_str();
  c_rec->add_flag("--per-angle-cor", rec.per_angle_cor, "Explicit mode: one CoR per angle");
  c_rec->add_option("--known-cor", rec.known_cor, "Explicit mode: align with this CoR (x,y) instead of recovering it");
  c_rec->add_option("--known-cor-file", rec.known_cor_file, "Explicit mode: align with the CoRs of a drift file");
  c_rec->add_option("--grad-tol", rec.grad_tol)->capture_default_str();
  c_rec->add_option("--max-outer", rec.max_outer)->capture_default_str();
  c_rec->add_option("--max-inner", rec.max_inner)->capture_default_str();
  c_rec->add_option("--rounds", rec.rounds, "Alternating: outer rounds")->capture_default_str();
  c_rec->add_option("--round-iters", rec.round_iters, "Alternating: TN iterations per round")->capture_default_str();
  c_rec->add_option("--upsample", rec.upsample, "Alternating: correlation upsampling")->capture_default_str();
  c_rec->add_option("--truth", rec.truth, "Ground truth image for the SSIM log column");
  c_rec->add_option("--out", rec.out, "Output directory")->required();
  c_rec->add_option("--log", rec.log, "Per-iteration CSV log");

  SweepFlags sweep;
  auto* c_sweep = app.add_subcommand("sweep-sigma", "Translation error over (N_tau, sigma)");
  c_sweep->add_option("--ntau-list", sweep.ntau_list)->capture_default_str();
  c_sweep->add_option("--sigma-range", sweep.sigma_range, "lo:hi:count, log spaced")->capture_default_str();
  c_sweep->add_option("--phantom", sweep.phantom)->check(CLI::IsMember({"disk", "shepp-logan"}))->capture_default_str();
  c_sweep->add_option("--out", sweep.out, "CSV path (stdout when omitted)");

  MetricsFlags met;
  auto* c_met = app.add_subcommand("metrics", "SSIM of two images or rel_misfit of two sinograms");
  c_met->add_option("--ref", met.ref)->required();
  c_met->add_option("--test", met.test)->required();
  c_met->add_option("--csv", met.csv, "Append the result to this CSV");

  BenchFlags bench;
  auto* c_bench = app.add_subcommand("bench", "Time one implicit (value, gradient) evaluation per grid size");
  c_bench->add_option("--n-list", bench.n_list)->capture_default_str();
  c_bench->add_option("--reps", bench.reps)->check(CLI::Range(1, 1000))->capture_default_str();
  c_bench->add_option("--angles", bench.angles)->check(CLI::Range(1, 100000))->capture_default_str();
  c_bench->add_option("--out", bench.out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim, *c_sim);
    if (c_rec->parsed()) return run_reconstruct(rec, *c_rec);
    if (c_sweep->parsed()) return run_sweep(sweep, *c_sweep);
    if (c_met->parsed()) return run_metrics(met, *c_met);
    if (c_bench->parsed()) return run_bench(bench, *c_bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
