#pragma once

#include <optional>
#include <vector>

#include "risloc/channel.hpp"
#include "risloc/geometry.hpp"

namespace risloc {

/// Matched gains of one surface across soundings, with the phase diagonal of each sounding.
/// Soundings where the surface path was not identified keep an empty gain.
struct GainSeries {
  int ris_index = 0;
  std::vector<std::optional<Complex>> gains;
  std::vector<CVector> configs;

  int present() const;
};

/// P(phi, theta) sampled over the front half-space of a panel at spacing pi / (2N).
struct SpectrumGrid {
  int samples_per_half_pi = 0;
  std::vector<double> azimuths;
  std::vector<double> elevations;
  /// values(i, j) is P at (azimuths[j], elevations[i]).
  Eigen::MatrixXd values;

  /// Grid point holding the maximum (first one in row-major order on ties).
  AzEl argmax() const;
};

struct AoaOptions {
  /// Parabolic refinement of the grid peak along each axis.
  bool interpolate = false;
  /// Keep at most M_r - 1 subspace directions instead of rejecting B - 1 >= M_r.
  bool truncate_subspace = false;
};

struct RisAoaResult {
  AzEl aoa;
  SpectrumGrid spectrum;
  int subspace_dim = 0;
  /// |row_b . a_r(aoa)| for every row of the ratio matrix.
  std::vector<double> row_residuals;
};

/// Rows a_r(ap_dir)^H (g_ref Omega_b - g_b Omega_ref), one per present sounding after the
/// reference (the first present one). Throws InsufficientSoundings with fewer than 2 gains.
CMatrix ratio_matrix(const GainSeries& series, const AzEl& ap_dir, const RisPanel& panel,
                     double wavelength);

/// Orthonormal basis (M_r x rank) of the row space of `a`. Directions with singular values below
/// 1e-12 sigma_max are dropped; `max_dim` caps the kept count. Throws DegenerateSubspace for a
/// zero matrix.
CMatrix subspace_basis(const CMatrix& a, std::optional<int> max_dim = std::nullopt);

/// Evaluates 1 / max(||U^H a_r||^2, 1e-18) over the panel's front half-space.
SpectrumGrid pseudo_spectrum(const CMatrix& u, const RisPanel& panel, double wavelength, int n);

RisAoaResult estimate_ris_aoa_detailed(const GainSeries& series, const AzEl& ap_dir,
                                       const RisPanel& panel, double wavelength, int n,
                                       const AoaOptions& options = {});

/// Peak of the pseudo spectrum.
AzEl estimate_ris_aoa(const GainSeries& series, const AzEl& ap_dir, const RisPanel& panel,
                      double wavelength, int n, const AoaOptions& options = {});

}  // namespace risloc
