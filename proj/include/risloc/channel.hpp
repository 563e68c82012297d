#pragma once

#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "risloc/geometry.hpp"

namespace risloc {

using Rng = std::mt19937_64;

enum class PhaseMode { continuous, one_bit };

/// Mounting wall of a panel in an axis-aligned room with a corner at the origin.
/// The panel normal points into the room.
enum class Wall { x_min, y_min, x_max, y_max };

PhaseMode parse_phase_mode(std::string_view text);
std::string_view to_string(PhaseMode mode);
Wall parse_wall(std::string_view text);
std::string_view to_string(Wall wall);

/// Frame for a panel centered at `center` on `wall`. axis_v is always vertical.
PanelFrame wall_frame(Wall wall, const Point3& center);

/// Reconfigurable surface: geometry plus the phase diagonal active in one sounding.
struct RisPanel {
  PanelFrame frame;
  ArrayGrid grid;
  /// Unit-modulus reflection coefficients, one per element (x-major).
  CVector phases;

  const Point3& center() const { return frame.origin; }
  /// Panel with every element set to phase 0.
  static RisPanel make(const PanelFrame& frame, const ArrayGrid& grid);
};

struct Scatterer {
  Point3 position;
  double rcs = 0.0;  // m^2
};

/// Type-4 scatterer together with the surface that re-reflects it toward the AP.
struct RisScatterer {
  Point3 position;
  int ris_index = 0;
};

struct RoomSize {
  double x = 10.0;
  double y = 10.0;
  double z = 3.0;
};

struct SceneConfig {
  double wavelength = kSpeedOfLight / 5.24e9;
  RoomSize room;
  Point3 ap_position{2.0, 2.0, 3.0};
  ArrayGrid ap_grid;
  double ap_gain = 1.0;  // linear
  std::vector<RisPanel> ris_panels;
  Point3 ue_position{5.0, 5.0, 1.0};
  std::vector<Point3> scatterers;
  std::vector<RisScatterer> ris_scatterers;
  double mean_rcs = 0.6;         // m^2
  double tx_power_w = 1.0;       // W
  double noise_power_w = 0.0;    // W per antenna; 0 disables noise
  bool los_blocked = false;
  PhaseMode phase_mode = PhaseMode::continuous;
  bool enforce_far_field = true;

  /// Scene with the default two-surface indoor layout (half-wavelength, 10x10 arrays).
  static SceneConfig standard();
};

enum class PathType { los = 1, scattered = 2, ris = 3, scatter_ris = 4 };

struct PathRecord {
  PathType type = PathType::los;
  Complex gain;  // amplitude ratio before transmit-power scaling
  NormalizedAoa aoa_at_ap;
  std::optional<int> ris_index;
};

struct Sounding {
  int index = 0;
  CVector h;
  /// Phase diagonal used by each surface during this sounding.
  std::vector<CVector> ris_phases;
};

struct SynthesisResult {
  Sounding sounding;
  std::vector<PathRecord> paths;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// cos(beta) in front of the panel, 0 behind it; beta measured from the panel normal.
double radiation_pattern(const AzEl& direction, const PanelFrame& panel);

Complex los_gain(const Point3& ue, const Point3& ap, double wavelength, double ap_gain);

Complex scatter_gain(const Scatterer& sc, const Point3& ue, const Point3& ap, double wavelength,
                     double ap_gain);

/// Far-field gain through a single element, including the center-referenced
/// propagation phase exp(-j 2 pi (d_rp + d_ru) / lambda).
Complex ris_element_gain(const RisPanel& panel, const AzEl& ap_dir, const AzEl& ue_dir, double d_rp,
                         double d_ru, double wavelength, double ap_gain);

/// Local steering vector of a panel toward `dir`, built from the in-plane direction cosines.
CVector ris_steering(const RisPanel& panel, const AzEl& dir, double wavelength);

/// element_gain * a_r(ap_dir)^H diag(phases) a_r(ue_dir).
Complex ris_total_gain(const RisPanel& panel, Complex element_gain, const AzEl& ap_dir,
                       const AzEl& ue_dir, double wavelength);

/// UE -> scatterer -> surface -> AP path.
Complex scatter_ris_gain(const Scatterer& sc, const RisPanel& panel, const Point3& ue,
                         const Point3& ap, double wavelength, double ap_gain);

CVector sample_phase_config(const ArrayGrid& grid, PhaseMode mode, Rng& rng);

/// Swerling II: exponential draw with the given mean.
double sample_rcs(double mean, Rng& rng);

/// Throws ConfigError when the AP or UE sits inside the Rayleigh distance of a surface.
void validate_far_field(const SceneConfig& scene);

/// Uniform positions inside the room, rejecting any within `min_separation` of the AP, the
/// UE or a surface center.
std::vector<Point3> sample_scatterer_positions(const SceneConfig& scene, int count,
                                               double min_separation, Rng& rng);

/// Draws fresh phase configurations and RCS values, then forms
/// h = sqrt(P) * sum g a_p(omega, psi) + n.
SynthesisResult synthesize_sounding(const SceneConfig& scene, int index, Rng& rng);

}  // namespace risloc
