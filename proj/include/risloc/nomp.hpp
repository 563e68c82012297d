#pragma once

#include <vector>

#include "risloc/geometry.hpp"

namespace risloc {

/// How the stopping threshold is compared against the residual.
enum class EnergyRule {
  total,        ///< ||r||^2 < threshold
  per_antenna,  ///< ||r||^2 / M_p < threshold
};

struct NompConfig {
  int max_paths = 12;
  double energy_threshold_w = 1e-8;  // -50 dBm
  EnergyRule energy_rule = EnergyRule::total;
  int single_rounds = 5;
  int cyclic_rounds = 7;
  int oversampling = 4;
};

struct ExtractedPath {
  Complex gain;
  NormalizedAoa aoa;
};

struct ExtractedPathSet {
  /// In extraction order.
  std::vector<ExtractedPath> paths;
  double residual_energy = 0.0;
  /// ||r||^2 before the first detection and after every extracted path.
  std::vector<double> energy_trace;
};

/// h - sum_k g_k a_p(omega_k, psi_k).
CVector residual(const CVector& h, const std::vector<ExtractedPath>& paths, const ArrayGrid& shape);

/// Objective |a^H r|^2 / M_p of a candidate direction.
double projection_energy(const CVector& r, const NormalizedAoa& aoa, const ArrayGrid& shape);

struct Detection {
  ExtractedPath path;
  double objective = 0.0;
};

/// Best match of `r` on an (oversampling * nx) x (oversampling * ny) grid over [0, 2pi)^2.
Detection coarse_detect(const CVector& r, const ArrayGrid& shape, int oversampling);

/// Safeguarded Newton ascent of |a^H r_plus|^2 / M_p. `r_plus` is the residual with this
/// path added back. The objective never decreases; the gain is the projection a^H r_plus / M_p.
ExtractedPath newton_refine(const CVector& r_plus, const ExtractedPath& path, const ArrayGrid& shape,
                            int rounds, int oversampling = 4);

/// Re-refines every path in turn, then jointly refits all gains by least squares.
ExtractedPathSet cyclic_refine(const CVector& h, const ExtractedPathSet& paths,
                               const ArrayGrid& shape, int rounds, int oversampling = 4);

/// Least-squares gains of h on the given directions. Returns false (and leaves `paths`
/// untouched) when the steering vectors are nearly collinear.
bool refit_gains(const CVector& h, std::vector<ExtractedPath>& paths, const ArrayGrid& shape);

ExtractedPathSet nomp_extract(const CVector& h, const ArrayGrid& shape, const NompConfig& cfg);

}  // namespace risloc
