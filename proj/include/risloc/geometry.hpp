#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace risloc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Position in meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  static Point3 from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point3& a, const Point3& b);

/// Azimuth in (-pi, pi], elevation (polar angle from +z) in [0, pi].
struct AzEl {
  double azimuth = 0.0;
  double elevation = 0.0;

  friend bool operator==(const AzEl&, const AzEl&) = default;
};

/// Electrical phase increments per element along the two array axes, in [0, 2pi).
struct NormalizedAoa {
  double omega = 0.0;
  double psi = 0.0;

  friend bool operator==(const NormalizedAoa&, const NormalizedAoa&) = default;
};

/// Orthonormal frame of a planar array; normal = axis_u x axis_v.
struct PanelFrame {
  Point3 origin;
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();

  /// Builds a frame from two in-plane axes. Throws DegenerateGeometry unless
  /// they are unit-norm and orthogonal within 1e-12.
  static PanelFrame make(const Point3& origin, const Vec3& axis_u, const Vec3& axis_v);
};

/// Uniform planar array layout: nx * ny elements at spacing (dx, dy) meters.
/// Element (mx, my) sits at Kronecker index mx * ny + my.
struct ArrayGrid {
  int nx = 1;
  int ny = 1;
  double dx = 0.0;
  double dy = 0.0;

  int size() const { return nx * ny; }
  /// Largest side length, used for the Rayleigh distance.
  double aperture() const;
};

/// Angles of the unit vector pointing from `from` toward `to`.
/// Throws DegenerateGeometry if the points coincide. Azimuth is 0 at the poles.
AzEl direction_angles(const Point3& from, const Point3& to);

/// [cos(az) sin(el), sin(az) sin(el), cos(el)].
Vec3 unit_direction(const AzEl& a);

/// Maps any angle into [0, 2pi).
double wrap_2pi(double angle);

/// Maps any angle into (-pi, pi].
double wrap_pi(double angle);

/// Normalized AOA of a direction seen by a horizontal array with axes along global x and y.
NormalizedAoa normalized_aoa(const AzEl& a, double spacing_x, double spacing_y, double wavelength);

/// Normalized AOA of a direction seen by an array lying in `frame`.
NormalizedAoa panel_aoa(const PanelFrame& frame, const AzEl& a, double spacing_u, double spacing_v,
                        double wavelength);

/// UPA steering vector with entries exp(+j (mx * omega + my * psi)), x-major order.
CVector steering_vector(const NormalizedAoa& n, int mx, int my);

/// Circular distance between two angles, in [0, pi].
double wrap_dist(double a, double b);

/// 2 D^2 / lambda.
double rayleigh_distance(double aperture, double wavelength);

}  // namespace risloc
