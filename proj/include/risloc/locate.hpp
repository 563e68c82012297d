#pragma once

#include <vector>

#include "risloc/geometry.hpp"

namespace risloc {

/// Orthonormal basis attached to a bearing: d along it, c horizontal, v completing the triad.
struct TangentBasis {
  Vec3 d;
  Vec3 c;
  Vec3 v;
};

TangentBasis tangent_basis(const AzEl& a);

/// Known reference position and the estimated direction from it toward the UE.
/// The sign of the direction is irrelevant to the solver.
struct ReferenceBearing {
  Point3 position;
  AzEl bearing;
};

struct LsSolution {
  Point3 u;
  double residual_norm = 0.0;  // ||y - G u||, m
  double condition = 0.0;      // cond(G^T G)
};

/// Linear least squares over the c/v projections of every bearing (two rows per reference).
/// Throws Underdetermined for fewer than two bearings and DegenerateGeometry when
/// cond(G^T G) exceeds 1e12.
LsSolution ls_locate(const std::vector<ReferenceBearing>& bearings);

}  // namespace risloc
