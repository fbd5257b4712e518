#include "tomocor/phantoms.hpp"

#include <cmath>
#include <numbers>

#include "tomocor/error.hpp"

namespace tomocor {

Image make_disk(std::size_t n, double radius_frac, double value) {
  if (n < 2) throw InvalidParameter("make_disk: n must be >= 2");
  if (!(radius_frac > 0.0 && radius_frac <= 1.0)) {
    throw InvalidParameter("make_disk: radius_frac must lie in (0, 1]");
  }
  if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidParameter("make_disk: value must be >= 0");

  Image img(n);
  const double r = radius_frac * 0.5 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Point c = pixel_center(n, i, j);
      if (c.x * c.x + c.y * c.y <= r * r) img(i, j) = value;
    }
  }
  return img;
}

Image make_shepp_logan(std::size_t n) {
  if (n < 2) throw InvalidParameter("make_shepp_logan: n must be >= 2");

  Image img(n);
  const double half = 0.5 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Point c = pixel_center(n, i, j);
      const double x = c.x / half;
      const double y = c.y / half;
      double sum = 0.0;
      for (const Ellipse& e : kSheppLoganTable) {
        const double phi = e.angle_deg * std::numbers::pi / 180.0;
        const double dx = x - e.center_x;
        const double dy = y - e.center_y;
        // coordinates along the a and b axes
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double v = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.semi_axis_a * e.semi_axis_a) + (v * v) / (e.semi_axis_b * e.semi_axis_b) <= 1.0) {
          sum += e.intensity;
        }
      }
      img(i, j) = sum > 0.0 ? sum : 0.0;
    }
  }
  return img;
}

double ellipse_line_integral(const Ellipse& e, std::size_t n, double theta, double tau) {
  const double scale = static_cast<double>(n) / 2.0;
  const double a = e.semi_axis_a * scale;
  const double b = e.semi_axis_b * scale;
  const double rel = theta - e.angle_deg * std::numbers::pi / 180.0;
  const double s2 = a * a * std::cos(rel) * std::cos(rel) + b * b * std::sin(rel) * std::sin(rel);
  const double t = tau - scale * (e.center_x * std::cos(theta) + e.center_y * std::sin(theta));
  if (t * t >= s2) return 0.0;
  return e.intensity * 2.0 * a * b * std::sqrt(s2 - t * t) / s2;
}

double shepp_logan_line_integral(std::size_t n, double theta, double tau) {
  double sum = 0.0;
  for (const Ellipse& e : kSheppLoganTable) sum += ellipse_line_integral(e, n, theta, tau);
  return sum;
}

double disk_line_integral(std::size_t n, double radius_frac, double value, double theta, double tau) {
  (void)theta;  // rotation invariant
  const double r = radius_frac * static_cast<double>(n) / 2.0;
  return tau * tau < r * r ? 2.0 * value * std::sqrt(r * r - tau * tau) : 0.0;
}

}  // namespace tomocor
