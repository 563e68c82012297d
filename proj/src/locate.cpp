#include "risloc/locate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "risloc/errors.hpp"

namespace risloc {

TangentBasis tangent_basis(const AzEl& a) {
  const double cp = std::cos(a.azimuth);
  const double sp = std::sin(a.azimuth);
  const double ct = std::cos(a.elevation);
  const double st = std::sin(a.elevation);
  return {Vec3(cp * st, sp * st, ct), Vec3(-sp, cp, 0.0), Vec3(-cp * ct, -sp * ct, st)};
}

LsSolution ls_locate(const std::vector<ReferenceBearing>& bearings) {
  if (bearings.size() < 2) {
    throw Underdetermined("need at least two reference bearings, got " +
                          std::to_string(bearings.size()));
  }
  const auto rows = static_cast<Eigen::Index>(2 * bearings.size());
  Eigen::MatrixXd g(rows, 3);
  Eigen::VectorXd y(rows);
  for (std::size_t l = 0; l < bearings.size(); ++l) {
    const TangentBasis basis = tangent_basis(bearings[l].bearing);
    const Vec3 r = bearings[l].position.vec();
    const auto i = static_cast<Eigen::Index>(2 * l);
    g.row(i) = basis.c.transpose();
    g.row(i + 1) = basis.v.transpose();
    y[i] = basis.c.dot(r);
    y[i + 1] = basis.v.dot(r);
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto& sv = svd.singularValues();
  const double condition =
      sv[2] > 0.0 ? (sv[0] / sv[2]) * (sv[0] / sv[2]) : std::numeric_limits<double>::infinity();
  if (!(condition <= 1e12)) {
    throw DegenerateGeometry("bearings are collinear (cond(G^T G) = " + std::to_string(condition) +
                             ")");
  }

  const Vec3 u = g.colPivHouseholderQr().solve(y);
  LsSolution out;
  out.u = Point3::from(u);
  out.residual_norm = (y - g * u).norm();
  out.condition = condition;
  return out;
}

}  // namespace risloc
