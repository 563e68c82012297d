#include "risloc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "risloc/errors.hpp"

namespace risloc {

double distance(const Point3& a, const Point3& b) { return (a.vec() - b.vec()).norm(); }

PanelFrame PanelFrame::make(const Point3& origin, const Vec3& axis_u, const Vec3& axis_v) {
  constexpr double tol = 1e-12;
  if (std::abs(axis_u.norm() - 1.0) > tol || std::abs(axis_v.norm() - 1.0) > tol) {
    throw DegenerateGeometry("panel axes must be unit vectors");
  }
  if (std::abs(axis_u.dot(axis_v)) > tol) {
    throw DegenerateGeometry("panel axes must be orthogonal");
  }
  return PanelFrame{origin, axis_u, axis_v, axis_u.cross(axis_v)};
}

double ArrayGrid::aperture() const { return std::max(nx * dx, ny * dy); }

AzEl direction_angles(const Point3& from, const Point3& to) {
  const Vec3 diff = to.vec() - from.vec();
  const double r = diff.norm();
  if (!(r > 0.0)) {
    throw DegenerateGeometry("direction between coincident points");
  }
  const Vec3 d = diff / r;
  const double elevation = std::acos(std::clamp(d.z(), -1.0, 1.0));
  const double horizontal = std::hypot(d.x(), d.y());
  // atan2 already returns (-pi, pi]; at the poles the azimuth is pinned to 0.
  const double azimuth = horizontal == 0.0 ? 0.0 : std::atan2(d.y(), d.x());
  return {azimuth, elevation};
}

Vec3 unit_direction(const AzEl& a) {
  const double s = std::sin(a.elevation);
  return {std::cos(a.azimuth) * s, std::sin(a.azimuth) * s, std::cos(a.elevation)};
}

double wrap_2pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_pi(double angle) {
  const double w = wrap_2pi(angle);
  return w > kPi ? w - kTwoPi : w;
}

NormalizedAoa normalized_aoa(const AzEl& a, double spacing_x, double spacing_y, double wavelength) {
  const double s = std::sin(a.elevation);
  return {wrap_2pi(kTwoPi * spacing_x / wavelength * std::cos(a.azimuth) * s),
          wrap_2pi(kTwoPi * spacing_y / wavelength * std::sin(a.azimuth) * s)};
}

NormalizedAoa panel_aoa(const PanelFrame& frame, const AzEl& a, double spacing_u, double spacing_v,
                        double wavelength) {
  const Vec3 d = unit_direction(a);
  return {wrap_2pi(kTwoPi * spacing_u / wavelength * d.dot(frame.axis_u)),
          wrap_2pi(kTwoPi * spacing_v / wavelength * d.dot(frame.axis_v))};
}

CVector steering_vector(const NormalizedAoa& n, int mx, int my) {
  CVector ax(mx);
  CVector ay(my);
  for (int ix = 0; ix < mx; ++ix) ax[ix] = std::polar(1.0, ix * n.omega);
  for (int iy = 0; iy < my; ++iy) ay[iy] = std::polar(1.0, iy * n.psi);
  CVector a(static_cast<Eigen::Index>(mx) * my);
  for (int ix = 0; ix < mx; ++ix) {
    a.segment(static_cast<Eigen::Index>(ix) * my, my) = ax[ix] * ay;
  }
  return a;
}

double wrap_dist(double a, double b) {
  const double d = wrap_2pi(a - b);
  return std::min(d, kTwoPi - d);
}

double rayleigh_distance(double aperture, double wavelength) {
  return 2.0 * aperture * aperture / wavelength;
}

}  // namespace risloc
