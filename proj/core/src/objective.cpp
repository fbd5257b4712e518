#include "tomocor/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tomocor/error.hpp"

namespace tomocor {

namespace {

double half_squared_norm(std::span<const double> r) {
  double acc = 0.0;
  for (double v : r) acc += v * v;
  return 0.5 * acc;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("lambda must be >= 0");
}

}  // namespace

StandardObjective::StandardObjective(const SystemMatrix& L, const Sinogram& d) : L_(&L), d_(&d) {
  if (d.size() != L.rows()) throw DimensionMismatch("StandardObjective: sinogram does not match system matrix");
}

ObjectiveReport StandardObjective::evaluate(std::span<const double> x) const {
  if (x.size() != L_->cols()) throw DimensionMismatch("StandardObjective: variable length");
  std::vector<double> r(L_->rows());
  L_->multiply(x, r);
  const auto data = d_->values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= data[i];
  ObjectiveReport rep;
  rep.value = half_squared_norm(r);
  rep.gradient.resize(L_->cols());
  L_->multiply_transpose(r, rep.gradient);
  return rep;
}

ShiftedDataTerm::ShiftedDataTerm(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma)
    : L_(&L), geom_(&geom), translator_(geom.n_beamlets, geom.spacing, sigma) {
  if (!d.matches(geom) || L.rows() != geom.rows() || L.cols() != geom.pixels()) {
    throw DimensionMismatch("ShiftedDataTerm: sinogram, matrix and geometry disagree");
  }
  spectra_.reserve(geom.n_angles);
  for (std::size_t a = 0; a < geom.n_angles; ++a) spectra_.push_back(translator_.spectrum(d.row(a)));
}

Sinogram ShiftedDataTerm::translated(std::span<const double> shifts) const {
  if (shifts.size() != geom_->n_angles) throw DimensionMismatch("one shift per angle required");
  Sinogram g(*geom_);
  for (std::size_t a = 0; a < geom_->n_angles; ++a) translator_.translate_spectrum(spectra_[a], shifts[a], g.row(a), {});
  return g;
}

double ShiftedDataTerm::evaluate(std::span<const double> w, std::span<const double> shifts, std::span<double> grad_w,
                                 std::span<double> grad_p) const {
  const std::size_t nb = geom_->n_beamlets;
  if (w.size() != L_->cols() || shifts.size() != geom_->n_angles || grad_w.size() != w.size() ||
      grad_p.size() != shifts.size()) {
    throw DimensionMismatch("ShiftedDataTerm::evaluate: argument sizes");
  }
  const double limit = geom_->detector_half_span();
  for (double p : shifts) {
    if (!(std::abs(p) < limit)) {
      // outside the detector: infeasible trial point
      std::fill(grad_w.begin(), grad_w.end(), std::numeric_limits<double>::quiet_NaN());
      std::fill(grad_p.begin(), grad_p.end(), std::numeric_limits<double>::quiet_NaN());
      return std::numeric_limits<double>::infinity();
    }
  }
  std::vector<double> r(L_->rows());
  L_->multiply(w, r);

  std::vector<double> g(nb);
  std::vector<double> dg(nb);
  for (std::size_t a = 0; a < geom_->n_angles; ++a) {
    translator_.translate_spectrum(spectra_[a], shifts[a], g, dg);
    double acc = 0.0;
    double* ra = r.data() + a * nb;
    for (std::size_t k = 0; k < nb; ++k) {
      ra[k] -= g[k];
      // residual is L w - g, so d r / d P = -d g / d P
      acc -= ra[k] * dg[k];
    }
    grad_p[a] = acc;
  }
  L_->multiply_transpose(r, grad_w);
  return half_squared_norm(r);
}

ImplicitObjective::ImplicitObjective(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma)
    : term_(L, d, geom, sigma) {}

ObjectiveReport ImplicitObjective::evaluate(std::span<const double> x) const {
  if (x.size() != dimension()) throw DimensionMismatch("ImplicitObjective: variable length");
  const std::size_t np = image_size();
  ObjectiveReport rep;
  rep.gradient.resize(x.size());
  std::span<double> grad(rep.gradient);
  rep.value = term_.evaluate(x.first(np), x.subspan(np), grad.first(np), grad.subspan(np));
  return rep;
}

ExplicitObjective::ExplicitObjective(const SystemMatrix& L, const Sinogram& d, const Geometry& geom, double sigma,
                                     std::size_t n_cors)
    : term_(L, d, geom, sigma), n_cors_(n_cors) {
  if (n_cors != 1 && n_cors != geom.n_angles) {
    throw InvalidParameter("explicit objective needs 1 or n_angles centers, got " + std::to_string(n_cors));
  }
}

std::vector<double> ExplicitObjective::shifts_for(std::span<const double> aux) const {
  if (aux.size() != 2 * n_cors_) throw DimensionMismatch("ExplicitObjective: aux length");
  const Geometry& geom = term_.geometry();
  std::vector<double> p(geom.n_angles);
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    const std::size_t c = n_cors_ == 1 ? 0 : a;
    p[a] = shift_amount(geom.angles[a], aux[c], aux[n_cors_ + c]);
  }
  return p;
}

ObjectiveReport ExplicitObjective::evaluate(std::span<const double> x) const {
  if (x.size() != dimension()) throw DimensionMismatch("ExplicitObjective: variable length");
  const Geometry& geom = term_.geometry();
  const std::size_t np = image_size();
  const auto aux = x.subspan(np);
  const std::vector<double> p = shifts_for(aux);

  ObjectiveReport rep;
  rep.gradient.assign(x.size(), 0.0);
  std::span<double> grad(rep.gradient);
  std::vector<double> grad_p(geom.n_angles);
  rep.value = term_.evaluate(x.first(np), p, grad.first(np), grad_p);

  auto gx = grad.subspan(np, n_cors_);
  auto gy = grad.subspan(np + n_cors_, n_cors_);
  for (std::size_t a = 0; a < geom.n_angles; ++a) {
    const std::size_t c = n_cors_ == 1 ? 0 : a;
    gx[c] += grad_p[a] * (1.0 - std::cos(geom.angles[a]));
    gy[c] += grad_p[a] * std::sin(geom.angles[a]);
  }
  return rep;
}

void laplacian(std::size_t n, std::span<const double> w, std::span<double> out) {
  if (w.size() != n * n || out.size() != n * n) throw DimensionMismatch("laplacian: size");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = 4.0 * w[i * n + j];
      if (i > 0) v -= w[(i - 1) * n + j];
      if (i + 1 < n) v -= w[(i + 1) * n + j];
      if (j > 0) v -= w[i * n + j - 1];
      if (j + 1 < n) v -= w[i * n + j + 1];
      out[i * n + j] = v;
    }
  }
}

double smoothed_tv(std::size_t n, std::span<const double> w, double eps, std::span<double> grad) {
  if (w.size() != n * n || (!grad.empty() && grad.size() != n * n)) throw DimensionMismatch("smoothed_tv: size");
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  const double eps2 = eps * eps;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t at = i * n + j;
      const double dx = j + 1 < n ? w[at + 1] - w[at] : 0.0;
      const double dy = i + 1 < n ? w[at + n] - w[at] : 0.0;
      const double mag = std::sqrt(dx * dx + dy * dy + eps2);
      total += mag;
      if (!grad.empty()) {
        if (j + 1 < n) {
          grad[at + 1] += dx / mag;
          grad[at] -= dx / mag;
        }
        if (i + 1 < n) {
          grad[at + n] += dy / mag;
          grad[at] -= dy / mag;
        }
      }
    }
  }
  return total;
}

L2Objective::L2Objective(const SystemMatrix& L, const Sinogram& d, std::size_t n, double lambda)
    : base_(L, d), n_(n), lambda_(lambda) {
  check_lambda(lambda);
  if (n * n != L.cols()) throw DimensionMismatch("L2Objective: grid side does not match the system matrix");
}

ObjectiveReport L2Objective::evaluate(std::span<const double> x) const {
  ObjectiveReport rep = base_.evaluate(x);
  if (lambda_ == 0.0) return rep;
  std::vector<double> lw(x.size());
  std::vector<double> llw(x.size());
  laplacian(n_, x, lw);
  laplacian(n_, lw, llw);  // the zero-boundary 5-point Laplacian is symmetric
  double reg = 0.0;
  for (double v : lw) reg += v * v;
  rep.value += lambda_ * reg;
  for (std::size_t i = 0; i < x.size(); ++i) rep.gradient[i] += 2.0 * lambda_ * llw[i];
  return rep;
}

TvObjective::TvObjective(const SystemMatrix& L, const Sinogram& d, std::size_t n, double lambda, double eps)
    : base_(L, d), n_(n), lambda_(lambda), eps_(eps) {
  check_lambda(lambda);
  if (!(eps > 0.0)) throw InvalidParameter("TV smoothing epsilon must be positive");
  if (n * n != L.cols()) throw DimensionMismatch("TvObjective: grid side does not match the system matrix");
}

ObjectiveReport TvObjective::evaluate(std::span<const double> x) const {
  ObjectiveReport rep = base_.evaluate(x);
  if (lambda_ == 0.0) return rep;
  std::vector<double> g(x.size());
  rep.value += lambda_ * smoothed_tv(n_, x, eps_, g);
  for (std::size_t i = 0; i < x.size(); ++i) rep.gradient[i] += lambda_ * g[i];
  return rep;
}

ObjectiveReport phi_standard(std::span<const double> w, const Sinogram& d, const SystemMatrix& L) {
  return StandardObjective(L, d).evaluate(w);
}

ObjectiveReport phi_explicit(std::span<const double> w, std::span<const double> x_star,
                             std::span<const double> y_star, const Sinogram& d, const SystemMatrix& L,
                             const Geometry& geom, double sigma) {
  if (x_star.size() != y_star.size()) throw DimensionMismatch("phi_explicit: x* and y* lengths differ");
  ExplicitObjective obj(L, d, geom, sigma, x_star.size());
  std::vector<double> x(w.begin(), w.end());
  x.insert(x.end(), x_star.begin(), x_star.end());
  x.insert(x.end(), y_star.begin(), y_star.end());
  return obj.evaluate(x);
}

ObjectiveReport phi_implicit(std::span<const double> w, const ShiftParams& p, const Sinogram& d,
                             const SystemMatrix& L, const Geometry& geom, double sigma) {
  ImplicitObjective obj(L, d, geom, sigma);
  std::vector<double> x(w.begin(), w.end());
  x.insert(x.end(), p.values.begin(), p.values.end());
  return obj.evaluate(x);
}

ObjectiveReport phi_l2(std::span<const double> w, const Sinogram& d, const SystemMatrix& L, std::size_t n,
                       double lambda) {
  return L2Objective(L, d, n, lambda).evaluate(w);
}

ObjectiveReport phi_tv(std::span<const double> w, const Sinogram& d, const SystemMatrix& L, std::size_t n,
                       double lambda, double eps_huber) {
  return TvObjective(L, d, n, lambda, eps_huber).evaluate(w);
}

}  // namespace tomocor
