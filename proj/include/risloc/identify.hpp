#pragma once

#include <optional>
#include <vector>

#include "risloc/geometry.hpp"
#include "risloc/nomp.hpp"

namespace risloc {

struct RisMatch {
  int ris_index = 0;
  int sounding = 0;
  int path_index = 0;
  Complex gain;
  /// Squared wrapped distance to the expected AOA, rad^2.
  double error = 0.0;
};

struct MatchResult {
  /// One entry per surface; empty when no extracted path is close enough.
  std::vector<std::optional<RisMatch>> matches;
  /// consumed[k] is true when path k was assigned to a surface.
  std::vector<bool> consumed;
};

/// Squared wrapped distance between two normalized AOAs.
double match_error(const NormalizedAoa& expected, const NormalizedAoa& estimate);

/// Assigns extracted paths to surfaces whose AP-side AOA is known. Candidate pairs are taken in
/// ascending order of error, so each path goes to at most one surface and a surface that loses a
/// contested path falls back to its next-best candidate.
MatchResult match_ris_paths(const ExtractedPathSet& paths, const std::vector<NormalizedAoa>& ris_aoas,
                            double threshold, int sounding = 0);

/// First extracted path, unless a surface already claimed it.
std::optional<ExtractedPath> identify_los(const ExtractedPathSet& paths,
                                          const std::vector<bool>& consumed);

/// Half-space of the array plane an arrival comes from. A horizontal array cannot tell
/// the two apart, so the caller supplies it.
enum class Hemisphere { upper, lower };

/// Inverse of normalized_aoa on the chosen hemisphere. Both axes are read as signed phases in
/// (-pi, pi]; (0, 0) maps to the pole with azimuth 0.
AzEl aoa_from_normalized(const NormalizedAoa& n, double spacing_x, double spacing_y,
                         double wavelength, Hemisphere hemisphere = Hemisphere::upper);

/// Component-wise mean; empty input means no LOS was detected.
std::optional<AzEl> average_aoas(const std::vector<AzEl>& per_sounding);

struct LosEstimate {
  std::vector<AzEl> per_sounding;
  AzEl average;
  int detected = 0;
};

}  // namespace risloc
