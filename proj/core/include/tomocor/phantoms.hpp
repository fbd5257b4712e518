#pragma once

#include <array>
#include <cstddef>

#include "tomocor/image.hpp"

namespace tomocor {

/// Disk of intensity `value` centered on the grid. A pixel belongs to the disk
/// when its center lies within radius_frac * n/2 of the grid center.
Image make_disk(std::size_t n, double radius_frac, double value);

/// One ellipse of the Shepp-Logan table in the unit square [-1, 1]^2.
struct Ellipse {
  double intensity;
  double center_x;
  double center_y;
  double semi_axis_a;  // along the direction given by angle_deg
  double semi_axis_b;
  double angle_deg;    // counterclockwise from +x
};

/// Classical (unmodified) Shepp-Logan table as printed by Kak & Slaney,
/// "Principles of Computerized Tomographic Imaging", Table 3.1. Outer skull
/// intensity 2.0, brain 1.02.
inline constexpr std::array<Ellipse, 10> kSheppLoganTable = {{
    {2.00, 0.00, 0.0000, 0.920, 0.690, 90.0},
    {-0.98, 0.00, -0.0184, 0.874, 0.6624, 90.0},
    {-0.02, 0.22, 0.0000, 0.310, 0.110, 72.0},
    {-0.02, -0.22, 0.0000, 0.410, 0.160, 108.0},
    {0.01, 0.00, 0.3500, 0.250, 0.210, 90.0},
    {0.01, 0.00, 0.1000, 0.046, 0.046, 0.0},
    {0.01, 0.00, -0.1000, 0.046, 0.046, 0.0},
    {0.01, -0.08, -0.6050, 0.046, 0.023, 0.0},
    {0.01, 0.00, -0.6060, 0.023, 0.023, 0.0},
    {0.01, 0.06, -0.6050, 0.046, 0.023, 90.0},
}};

/// Shepp-Logan phantom sampled at pixel centers (the unit square maps onto
/// the grid), summed ellipse intensities clamped at zero.
Image make_shepp_logan(std::size_t n);

/// Exact integral of one ellipse (unit-square coordinates scaled by n/2 onto
/// pixel units) along the line x cos(theta) + y sin(theta) = tau.
double ellipse_line_integral(const Ellipse& e, std::size_t n, double theta, double tau);

/// Line integral of the continuous (unclamped, unsampled) Shepp-Logan phantom.
double shepp_logan_line_integral(std::size_t n, double theta, double tau);

/// Line integral of the continuous disk of make_disk.
double disk_line_integral(std::size_t n, double radius_frac, double value, double theta, double tau);

}  // namespace tomocor
