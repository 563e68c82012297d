#include "risloc/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "risloc/errors.hpp"
#include "risloc/locate.hpp"

namespace risloc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform_between(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (hi - lo) + lo;
}

int uniform_count(const CountRange& range, Rng& rng) {
  return std::uniform_int_distribution<int>(range.min, range.max)(rng);
}

Point3 region_center(const UeRegion& region) {
  return Point3::from(0.5 * (region.min.vec() + region.max.vec()));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::insufficient_references: return "insufficient_references";
    case TrialStatus::degenerate_geometry: return "degenerate_geometry";
    case TrialStatus::nomp_empty: return "nomp_empty";
  }
  return "ok";
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial));
}

TrialResult run_trial(const TrialConfig& cfg, Rng& rng) {
  const auto started = std::chrono::steady_clock::now();
  if (cfg.soundings < 2) throw ConfigError("at least two channel soundings are required");

  SceneConfig scene = cfg.scene;
  const double lambda = scene.wavelength;
  const int surfaces = static_cast<int>(scene.ris_panels.size());

  if (cfg.pinned_ue) {
    scene.ue_position = *cfg.pinned_ue;
  } else {
    const UeRegion& r = cfg.ue_region;
    scene.ue_position = {uniform_between(r.min.x, r.max.x, rng),
                         uniform_between(r.min.y, r.max.y, rng),
                         uniform_between(r.min.z, r.max.z, rng)};
  }
  if (cfg.randomize_scatterers) {
    const int n2 = uniform_count(cfg.scattered_paths, rng);
    scene.scatterers = sample_scatterer_positions(scene, n2, cfg.scatterer_min_separation, rng);
    scene.ris_scatterers.clear();
    if (surfaces > 0) {
      const int n4 = uniform_count(cfg.ris_scattered_paths, rng);
      const auto positions =
          sample_scatterer_positions(scene, n4, cfg.scatterer_min_separation, rng);
      std::uniform_int_distribution<int> pick(0, surfaces - 1);
      for (const auto& p : positions) scene.ris_scatterers.push_back({p, pick(rng)});
    }
  }
  if (scene.enforce_far_field) validate_far_field(scene);

  const ArrayGrid& ap = scene.ap_grid;
  TrialResult result;
  result.ue_true = scene.ue_position;
  result.los_truth = direction_angles(scene.ap_position, scene.ue_position);

  std::vector<NormalizedAoa> expected_at_ap;
  std::vector<AzEl> ap_dirs;
  std::vector<GainSeries> series(surfaces);
  for (int l = 0; l < surfaces; ++l) {
    const Point3& center = scene.ris_panels[l].center();
    expected_at_ap.push_back(
        normalized_aoa(direction_angles(scene.ap_position, center), ap.dx, ap.dy, lambda));
    ap_dirs.push_back(direction_angles(center, scene.ap_position));
    series[l].ris_index = l;
  }

  std::vector<AzEl> los_per_sounding;
  bool any_paths = false;
  for (int b = 0; b < cfg.soundings; ++b) {
    const SynthesisResult syn = synthesize_sounding(scene, b, rng);
    const ExtractedPathSet set = nomp_extract(syn.sounding.h, ap, cfg.nomp);
    const MatchResult match = match_ris_paths(set, expected_at_ap, cfg.match_threshold, b);
    any_paths = any_paths || !set.paths.empty();

    SoundingLog log;
    log.extracted = static_cast<int>(set.paths.size());
    log.residual_energy = set.residual_energy;
    for (int l = 0; l < surfaces; ++l) {
      series[l].configs.push_back(syn.sounding.ris_phases[l]);
      const auto& m = match.matches[l];
      series[l].gains.push_back(m ? std::optional<Complex>(m->gain) : std::nullopt);
      log.ris_matched.push_back(m.has_value());
    }
    if (cfg.use_los_reference) {
      if (const auto los = identify_los(set, match.consumed)) {
        los_per_sounding.push_back(
            aoa_from_normalized(los->aoa, ap.dx, ap.dy, lambda, cfg.ap_hemisphere));
        log.los_detected = true;
      }
    }
    result.soundings.push_back(std::move(log));
  }

  auto finish = [&](TrialStatus status) {
    result.status = status;
    result.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
  };
  if (!any_paths) return finish(TrialStatus::nomp_empty);

  std::vector<ReferenceBearing> bearings;
  result.los_detected = static_cast<int>(los_per_sounding.size());
  if (cfg.use_los_reference) {
    result.los_estimate = average_aoas(los_per_sounding);
    if (result.los_estimate) bearings.push_back({scene.ap_position, *result.los_estimate});
  }

  result.spectra.resize(cfg.keep_spectra ? surfaces : 0);
  for (int l = 0; l < surfaces; ++l) {
    const RisPanel& panel = scene.ris_panels[l];
    RisAoaOutcome outcome;
    outcome.ris_index = l;
    outcome.truth = direction_angles(panel.center(), scene.ue_position);
    outcome.matched_soundings = series[l].present();
    try {
      RisAoaResult est = estimate_ris_aoa_detailed(series[l], ap_dirs[l], panel, lambda,
                                                   cfg.spectrum_samples, cfg.aoa);
      outcome.estimate = est.aoa;
      bearings.push_back({panel.center(), est.aoa});
      if (cfg.keep_spectra) result.spectra[l] = std::move(est.spectrum);
    } catch (const Error& e) {
      outcome.failure = e.what();
    }
    result.ris.push_back(std::move(outcome));
  }

  if (bearings.size() < 2) return finish(TrialStatus::insufficient_references);
  try {
    result.estimate = ls_locate(bearings).u;
  } catch (const DegenerateGeometry&) {
    return finish(TrialStatus::degenerate_geometry);
  }
  return finish(TrialStatus::ok);
}

ReportRow aggregate(double value, const std::vector<TrialResult>& trials, const UeRegion& region,
                    RmsePolicy policy) {
  ReportRow row;
  row.value = value;
  row.trials = static_cast<int>(trials.size());

  const Point3 prior = region_center(region);
  double sq_u = 0.0;
  int n_u = 0;
  double sq_phi = 0.0, sq_theta = 0.0;
  int n_angle = 0;
  for (const auto& t : trials) {
    if (t.estimate) {
      sq_u += (t.estimate->vec() - t.ue_true.vec()).squaredNorm();
      ++n_u;
    } else {
      ++row.failures;
      if (policy == RmsePolicy::failures_at_prior) {
        sq_u += (prior.vec() - t.ue_true.vec()).squaredNorm();
        ++n_u;
      }
    }
    if (!t.ris.empty() && t.ris.front().estimate) {
      const AzEl& est = *t.ris.front().estimate;
      const AzEl& truth = t.ris.front().truth;
      const double dphi = wrap_pi(est.azimuth - truth.azimuth);
      const double dtheta = est.elevation - truth.elevation;
      sq_phi += dphi * dphi;
      sq_theta += dtheta * dtheta;
      ++n_angle;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.rmse_u = n_u > 0 ? std::sqrt(sq_u / n_u) : nan;
  row.rmse_phi_ris1 = n_angle > 0 ? std::sqrt(sq_phi / n_angle) : nan;
  row.rmse_theta_ris1 = n_angle > 0 ? std::sqrt(sq_theta / n_angle) : nan;
  row.failure_rate = row.trials > 0 ? static_cast<double>(row.failures) / row.trials : 0.0;
  return row;
}

ExperimentReport run_experiment(const Sweep& sweep, const ExperimentOptions& options) {
  if (options.trials < 1) throw ConfigError("an experiment needs at least one trial");
  const std::size_t n_points = sweep.points.size();
  const auto n_trials = static_cast<std::size_t>(options.trials);

  std::vector<std::vector<TrialResult>> results(n_points, std::vector<TrialResult>(n_trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_points * n_trials) return;
      const std::size_t p = job / n_trials;
      const std::size_t t = job % n_trials;
      try {
        Rng rng(trial_seed(options.seed, t));
        results[p][t] = run_trial(sweep.points[p].config, rng);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_points * n_trials);
      }
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.name = sweep.name;
  report.variable = sweep.variable;
  for (std::size_t p = 0; p < n_points; ++p) {
    const SweepPoint& point = sweep.points[p];
    report.rows.push_back(aggregate(point.value, results[p], point.config.ue_region, options.policy));
    report.rows.back().label = point.label;
  }
  if (options.keep_trials) report.trials = std::move(results);
  return report;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
  out << report.variable << ",RMSE_u_m,RMSE_phi_ris1_rad,RMSE_theta_ris1_rad,failure_rate,trials\n";
  for (const auto& row : report.rows) {
    out << (row.label.empty() ? format_number(row.value) : row.label) << ',' << format_number(row.rmse_u) << ','
        << format_number(row.rmse_phi_ris1) << ',' << format_number(row.rmse_theta_ris1) << ','
        << format_number(row.failure_rate) << ',' << row.trials << '\n';
  }
}

void write_spectrum_csv(const SpectrumGrid& grid, std::ostream& out) {
  out << "phi,theta,P\n";
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      out << format_number(grid.azimuths[j]) << ',' << format_number(grid.elevations[i]) << ','
          << format_number(grid.values(i, j)) << '\n';
    }
  }
}

}  // namespace risloc
