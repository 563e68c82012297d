#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risloc/channel.hpp"
#include "risloc/identify.hpp"
#include "risloc/nomp.hpp"
#include "risloc/ris_aoa.hpp"

namespace risloc {

/// Axis-aligned box the UE is drawn from (a degenerate axis pins that coordinate).
struct UeRegion {
  Point3 min{4.0, 4.0, 1.0};
  Point3 max{6.0, 6.0, 1.0};
};

struct CountRange {
  int min = 3;
  int max = 5;
};

/// Everything one localization trial needs. The UE position and the scatterer layout in
/// `scene` are redrawn by run_trial unless `pinned_ue` / `randomize_scatterers` say otherwise.
struct TrialConfig {
  SceneConfig scene = SceneConfig::standard();
  NompConfig nomp;
  int soundings = 30;
  int spectrum_samples = 200;
  double match_threshold = 0.1;
  AoaOptions aoa;
  bool use_los_reference = true;
  /// Side of the AP array the UE lies on (the default AP hangs from the ceiling).
  Hemisphere ap_hemisphere = Hemisphere::lower;
  UeRegion ue_region;
  std::optional<Point3> pinned_ue;
  bool randomize_scatterers = true;
  CountRange scattered_paths;
  CountRange ris_scattered_paths;
  double scatterer_min_separation = 0.5;
  /// Keep every surface's pseudo spectrum in the result.
  bool keep_spectra = false;
};

enum class TrialStatus { ok, insufficient_references, degenerate_geometry, nomp_empty };

std::string_view to_string(TrialStatus status);

struct RisAoaOutcome {
  int ris_index = 0;
  AzEl truth;
  std::optional<AzEl> estimate;
  int matched_soundings = 0;
  std::string failure;
};

struct SoundingLog {
  int extracted = 0;
  std::vector<bool> ris_matched;
  bool los_detected = false;
  double residual_energy = 0.0;
};

struct TrialResult {
  Point3 ue_true;
  std::optional<Point3> estimate;
  TrialStatus status = TrialStatus::ok;
  std::vector<RisAoaOutcome> ris;
  AzEl los_truth;
  std::optional<AzEl> los_estimate;
  int los_detected = 0;
  std::vector<SoundingLog> soundings;
  std::vector<std::optional<SpectrumGrid>> spectra;
  double wall_clock_s = 0.0;
};

/// One full localization: draw the scene, sound B times, extract and identify paths,
/// estimate surface AOAs, solve for the UE. Failures are reported in `status`, not thrown.
TrialResult run_trial(const TrialConfig& cfg, Rng& rng);

/// Independent stream seed for trial `trial` of an experiment with master seed `master`.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// How trials without a position estimate enter RMSE(u).
enum class RmsePolicy {
  estimated,          ///< RMSE over trials that produced an estimate
  failures_at_prior,  ///< failed trials count with the UE-region center as their estimate
};

struct SweepPoint {
  double value = 0.0;
  /// Written instead of `value` when the sweep variable is categorical.
  std::string label;
  TrialConfig config;
};

struct Sweep {
  std::string name;
  std::string variable;
  std::vector<SweepPoint> points;
};

struct ReportRow {
  double value = 0.0;
  std::string label;
  double rmse_u = 0.0;
  double rmse_phi_ris1 = 0.0;
  double rmse_theta_ris1 = 0.0;
  double failure_rate = 0.0;
  int trials = 0;
  int failures = 0;
};

struct ExperimentReport {
  std::string name;
  std::string variable;
  std::vector<ReportRow> rows;
  /// Per sweep point, per trial; filled when ExperimentOptions::keep_trials is set.
  std::vector<std::vector<TrialResult>> trials;
};

struct ExperimentOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  RmsePolicy policy = RmsePolicy::estimated;
  bool keep_trials = false;
};

/// Aggregates one sweep point. Exposed so the statistics can be checked against raw logs.
ReportRow aggregate(double value, const std::vector<TrialResult>& trials, const UeRegion& region,
                    RmsePolicy policy);

/// Runs every sweep point with the same per-trial seeds (paired comparison). The report does
/// not depend on the worker count.
ExperimentReport run_experiment(const Sweep& sweep, const ExperimentOptions& options);

/// Columns: <variable>,RMSE_u_m,RMSE_phi_ris1_rad,RMSE_theta_ris1_rad,failure_rate,trials
void write_csv(const ExperimentReport& report, std::ostream& out);

/// phi,theta,P triplets.
void write_spectrum_csv(const SpectrumGrid& grid, std::ostream& out);

}  // namespace risloc
