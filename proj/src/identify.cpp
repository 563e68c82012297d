#include "risloc/identify.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace risloc {

double match_error(const NormalizedAoa& expected, const NormalizedAoa& estimate) {
  const double dw = wrap_dist(expected.omega, estimate.omega);
  const double dp = wrap_dist(expected.psi, estimate.psi);
  return dw * dw + dp * dp;
}

MatchResult match_ris_paths(const ExtractedPathSet& paths, const std::vector<NormalizedAoa>& ris_aoas,
                            double threshold, int sounding) {
  struct Candidate {
    double error;
    int ris;
    int path;
  };
  std::vector<Candidate> candidates;
  for (int l = 0; l < static_cast<int>(ris_aoas.size()); ++l) {
    for (int k = 0; k < static_cast<int>(paths.paths.size()); ++k) {
      const double t = match_error(ris_aoas[l], paths.paths[k].aoa);
      if (t <= threshold) candidates.push_back({t, l, k});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.error, a.ris, a.path) < std::tie(b.error, b.ris, b.path);
  });

  MatchResult out;
  out.matches.resize(ris_aoas.size());
  out.consumed.assign(paths.paths.size(), false);
  for (const auto& c : candidates) {
    if (out.matches[c.ris] || out.consumed[c.path]) continue;
    out.matches[c.ris] = RisMatch{c.ris, sounding, c.path, paths.paths[c.path].gain, c.error};
    out.consumed[c.path] = true;
  }
  return out;
}

std::optional<ExtractedPath> identify_los(const ExtractedPathSet& paths,
                                          const std::vector<bool>& consumed) {
  if (paths.paths.empty()) return std::nullopt;
  if (!consumed.empty() && consumed.front()) return std::nullopt;
  return paths.paths.front();
}

AzEl aoa_from_normalized(const NormalizedAoa& n, double spacing_x, double spacing_y,
                         double wavelength, Hemisphere hemisphere) {
  const double w = wrap_pi(n.omega);
  const double p = wrap_pi(n.psi);
  if (w == 0.0 && p == 0.0) {
    return {0.0, hemisphere == Hemisphere::upper ? 0.0 : kPi};
  }
  // tan(phi) = d_x psi / (d_y omega); sin(theta) from the norm of both direction cosines.
  const double azimuth = std::atan2(spacing_x * p, spacing_y * w);
  const double cx = w * wavelength / (kTwoPi * spacing_x);
  const double cy = p * wavelength / (kTwoPi * spacing_y);
  const double sin_el = std::min(1.0, std::hypot(cx, cy));
  const double el = std::asin(sin_el);
  return {azimuth, hemisphere == Hemisphere::upper ? el : kPi - el};
}

std::optional<AzEl> average_aoas(const std::vector<AzEl>& per_sounding) {
  if (per_sounding.empty()) return std::nullopt;
  AzEl mean{0.0, 0.0};
  for (const auto& a : per_sounding) {
    mean.azimuth += a.azimuth;
    mean.elevation += a.elevation;
  }
  const double n = static_cast<double>(per_sounding.size());
  mean.azimuth /= n;
  mean.elevation /= n;
  return mean;
}

}  // namespace risloc
