#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risloc/harness.hpp"

namespace risloc {

struct RisPlacement {
  Point3 center;
  Wall wall = Wall::x_min;
  int nx = 10;
  int ny = 10;
  double element_size_wavelengths = 0.5;
};

/// Flat, file-friendly description of an experiment. Angles in radians, powers in dBm,
/// array spacings in wavelengths.
struct RunConfig {
  double frequency_hz = 5.24e9;
  RoomSize room;

  Point3 ap_position{2.0, 2.0, 3.0};
  int ap_nx = 10;
  int ap_ny = 10;
  double ap_spacing_wavelengths = 0.5;
  double ap_gain_dbi = 0.0;

  std::vector<RisPlacement> ris{{{0.0, 5.0, 2.0}, Wall::x_min}, {{5.0, 0.0, 2.0}, Wall::y_min}};

  UeRegion ue_region;
  std::optional<Point3> ue_position;

  bool los_blocked = false;
  CountRange type2_count;
  CountRange type4_count;
  double mean_rcs_m2 = 0.6;
  double scatterer_min_separation_m = 0.5;

  double tx_dbm = 30.0;
  double noise_dbm = -83.0;

  int max_paths = 12;
  double energy_threshold_dbm = -50.0;
  EnergyRule energy_rule = EnergyRule::total;
  int single_refinements = 5;
  int cyclic_refinements = 7;
  int oversampling = 4;

  double match_threshold = 0.1;
  int samples_per_half_pi = 200;
  bool interpolate = false;
  bool truncate_subspace = false;

  int soundings = 30;
  PhaseMode phase_mode = PhaseMode::continuous;
  bool use_los_reference = true;
  bool enforce_far_field = true;

  TrialConfig to_trial() const;
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
/// JSON text with every field present.
std::string dump_config(const RunConfig& config);

}  // namespace risloc
