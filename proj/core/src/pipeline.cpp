#include "tomocor/pipeline.hpp"

#include <array>
#include <memory>

#include "tomocor/error.hpp"
#include "tomocor/objective.hpp"

namespace tomocor {

namespace {

constexpr std::array<std::pair<Mode, const char*>, 7> kModeNames{{
    {Mode::Standard, "standard"},
    {Mode::Explicit, "explicit"},
    {Mode::Implicit, "implicit"},
    {Mode::L2, "l2"},
    {Mode::Tv, "tv"},
    {Mode::Mirror, "mirror"},
    {Mode::Alternating, "alternating"},
}};

SolverReport run(const Objective& obj, std::vector<double> x0, const SystemMatrix& L,
                 const ReconstructionOptions& opts) {
  const auto lower = image_lower_bounds(obj.image_size(), obj.dimension());
  const auto precond = default_preconditioner(L, obj.dimension());
  return tn_minimize(obj.as_function(), x0, lower, opts.solver, precond, opts.observer);
}

Image image_of(const SolverReport& rep, std::size_t n) {
  return Image(n, std::vector<double>(rep.x.begin(), rep.x.begin() + static_cast<long>(n * n)));
}

// Plain least squares on already aligned data.
ReconstructionResult fit_aligned(const Geometry& geom, const SystemMatrix& L, Sinogram aligned,
                                 const ReconstructionOptions& opts) {
  ReconstructionResult res;
  res.aligned = std::move(aligned);
  StandardObjective obj(L, res.aligned);
  res.report = run(obj, std::vector<double>(obj.dimension(), 0.0), L, opts);
  res.image = image_of(*res.report, geom.n);
  return res;
}

}  // namespace

const char* to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (name == n) return m;
  }
  throw InvalidParameter("unknown mode '" + std::string(name) + "'");
}

std::vector<double> default_preconditioner(const SystemMatrix& L, std::size_t dimension, double aux_scale) {
  if (dimension < L.cols()) throw DimensionMismatch("preconditioner shorter than the image block");
  if (!(aux_scale > 0.0)) throw InvalidParameter("aux preconditioner scale must be positive");
  std::vector<double> diag = L.normal_diagonal();
  for (double& v : diag) v = v > 0.0 ? v : 1.0;
  diag.resize(dimension, aux_scale);
  return diag;
}

ReconstructionResult reconstruct(const Geometry& geom, const SystemMatrix& L, const Sinogram& d,
                                 const ReconstructionOptions& opts) {
  if (!d.matches(geom) || L.rows() != geom.rows() || L.cols() != geom.pixels()) {
    throw DimensionMismatch("reconstruct: sinogram, matrix and geometry disagree");
  }
  opts.solver.validate();
  if (!(opts.sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  const std::size_t np = geom.pixels();

  switch (opts.mode) {
    case Mode::Standard:
      return fit_aligned(geom, L, d, opts);

    case Mode::L2:
    case Mode::Tv: {
      ReconstructionResult res;
      res.aligned = d;
      std::unique_ptr<Objective> obj;
      if (opts.mode == Mode::L2) {
        obj = std::make_unique<L2Objective>(L, d, geom.n, opts.lambda);
      } else {
        obj = std::make_unique<TvObjective>(L, d, geom.n, opts.lambda, opts.tv_eps);
      }
      res.report = run(*obj, std::vector<double>(np, 0.0), L, opts);
      res.image = image_of(*res.report, geom.n);
      return res;
    }

    case Mode::Explicit: {
      if (opts.known_cor) {
        const auto& cors = *opts.known_cor;
        DriftModel drift = cors.size() == 1 ? DriftModel::single(cors.front()) : DriftModel::per_angle(cors);
        drift.validate(geom);
        ShiftParams shifts = ShiftParams::from_drift(geom, drift);
        ReconstructionResult res = fit_aligned(geom, L, align_sinogram(d, shifts, opts.sigma, geom), opts);
        res.cors = cors;
        res.shifts = std::move(shifts);
        return res;
      }
      const std::size_t m = opts.per_angle_cor ? geom.n_angles : 1;
      ExplicitObjective obj(L, d, geom, opts.sigma, m);
      std::vector<double> x0(obj.dimension(), opts.init_shift);
      std::fill_n(x0.begin(), np, 0.0);
      ReconstructionResult res;
      res.report = run(obj, std::move(x0), L, opts);
      const auto aux = std::span<const double>(res.report->x).subspan(np);
      std::vector<Cor> cors(m);
      for (std::size_t c = 0; c < m; ++c) cors[c] = {aux[c], aux[m + c]};
      res.cors = std::move(cors);
      res.shifts = ShiftParams(obj.shifts_for(aux));
      res.aligned = obj.data_term().translated(res.shifts->values);
      res.image = image_of(*res.report, geom.n);
      return res;
    }

    case Mode::Implicit: {
      ImplicitObjective obj(L, d, geom, opts.sigma);
      std::vector<double> x0(obj.dimension(), opts.init_shift);
      std::fill_n(x0.begin(), np, 0.0);
      ReconstructionResult res;
      res.report = run(obj, std::move(x0), L, opts);
      const auto aux = std::span<const double>(res.report->x).subspan(np);
      res.shifts = ShiftParams(std::vector<double>(aux.begin(), aux.end()));
      res.aligned = obj.data_term().translated(res.shifts->values);
      res.image = image_of(*res.report, geom.n);
      return res;
    }

    case Mode::Mirror: {
      MirrorResult mirror = mirror_align(d, geom, opts.sigma);
      ReconstructionResult res = fit_aligned(geom, L, mirror.corrected, opts);
      res.shifts = ShiftParams(std::vector<double>(geom.n_angles, -mirror.offset));
      res.mirror = std::move(mirror);
      return res;
    }

    case Mode::Alternating: {
      AlternatingConfig cfg = opts.alternating;
      cfg.sigma = opts.sigma;
      if (!cfg.observer) cfg.observer = opts.observer;
      AlternatingResult alt = alternating_reproject(d, geom, L, cfg);
      ReconstructionResult res;
      res.image = alt.image;
      res.aligned = alt.corrected;
      res.shifts = alt.shifts;
      res.alternating = std::move(alt);
      return res;
    }
  }
  throw InvalidParameter("unhandled reconstruction mode");
}

}  // namespace tomocor
