#include <doctest.h>

#include <cmath>
#include <sstream>

#include "risloc/config.hpp"
#include "risloc/harness.hpp"
#include "risloc/recipes.hpp"

using namespace risloc;

namespace {

TrialConfig clean_config() {
  TrialConfig c;
  c.scene.noise_power_w = 0.0;
  c.scattered_paths = {0, 0};
  c.ris_scattered_paths = {0, 0};
  c.soundings = 12;
  return c;
}

TrialResult fake(Point3 truth, std::optional<Point3> est, double dphi = 0.0, double dtheta = 0.0) {
  TrialResult r;
  r.ue_true = truth;
  r.estimate = est;
  r.status = est ? TrialStatus::ok : TrialStatus::insufficient_references;
  RisAoaOutcome o;
  o.truth = {1.0, 1.5};
  o.estimate = AzEl{1.0 + dphi, 1.5 + dtheta};
  r.ris.push_back(o);
  return r;
}

}  // namespace

TEST_CASE("noiseless trial without scatterers lands within centimeters") {
  const TrialConfig c = clean_config();
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Rng rng(trial_seed(11, s));
    const TrialResult r = run_trial(c, rng);
    REQUIRE(r.status == TrialStatus::ok);
    REQUIRE(r.estimate);
    CHECK(distance(*r.estimate, r.ue_true) < 0.05);
    CHECK(r.los_detected == c.soundings);
    CHECK(r.ue_true.z == 1.0);
    for (const auto& o : r.ris) {
      CHECK(o.matched_soundings >= c.soundings / 2);
      CHECK(o.matched_soundings <= c.soundings);
      REQUIRE(o.estimate);
      CHECK(wrap_dist(o.estimate->azimuth, o.truth.azimuth) < 0.01);
      CHECK(std::abs(o.estimate->elevation - o.truth.elevation) < 0.01);
    }
  }
}

TEST_CASE("two surfaces suffice when the direct path is blocked") {
  TrialConfig c = clean_config();
  c.scene.los_blocked = true;
  c.use_los_reference = false;
  Rng rng(trial_seed(5, 0));
  const TrialResult r = run_trial(c, rng);
  REQUIRE(r.status == TrialStatus::ok);
  CHECK(r.los_detected == 0);
  CHECK(distance(*r.estimate, r.ue_true) < 0.1);
}

TEST_CASE("one sounding is rejected") {
  TrialConfig c = clean_config();
  c.soundings = 1;
  Rng rng(1);
  CHECK_THROWS(run_trial(c, rng));
}

TEST_CASE("run_trial is a function of the seed") {
  TrialConfig c;
  c.soundings = 6;
  Rng a(trial_seed(99, 4)), b(trial_seed(99, 4)), other(trial_seed(99, 5));
  const TrialResult x = run_trial(c, a), y = run_trial(c, b), z = run_trial(c, other);
  CHECK(x.ue_true == y.ue_true);
  CHECK(x.status == y.status);
  REQUIRE(x.estimate.has_value() == y.estimate.has_value());
  if (x.estimate) CHECK(*x.estimate == *y.estimate);
  CHECK_FALSE(x.ue_true == z.ue_true);
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("aggregate arithmetic") {
  const UeRegion region;
  std::vector<TrialResult> t{fake({5, 5, 1}, Point3{5.3, 5.4, 1.0}, 0.1, -0.2),
                             fake({5, 5, 1}, Point3{5.0, 5.0, 1.0}, -0.1, 0.2),
                             fake({4, 4, 1}, std::nullopt)};
  ReportRow r = aggregate(3.0, t, region, RmsePolicy::estimated);
  CHECK(r.value == 3.0);
  CHECK(r.trials == 3);
  CHECK(r.failures == 1);
  CHECK(r.failure_rate == doctest::Approx(1.0 / 3));
  CHECK(r.rmse_u == doctest::Approx(std::sqrt(0.25 / 2)));
  // Surface AOA errors count for every trial with a surface estimate, failed or not.
  CHECK(r.rmse_phi_ris1 == doctest::Approx(std::sqrt(0.02 / 3)));
  CHECK(r.rmse_theta_ris1 == doctest::Approx(std::sqrt(0.08 / 3)));

  r = aggregate(3.0, t, region, RmsePolicy::failures_at_prior);
  // The failed trial sits sqrt(2) m from the region center.
  CHECK(r.rmse_u == doctest::Approx(std::sqrt((0.25 + 0.0 + 2.0) / 3)));

  std::vector<TrialResult> wrap{fake({5, 5, 1}, Point3{5, 5, 1}, kTwoPi - 0.1)};
  CHECK(aggregate(0, wrap, region, RmsePolicy::estimated).rmse_phi_ris1 == doctest::Approx(0.1));

  const ReportRow none = aggregate(0, {fake({5, 5, 1}, std::nullopt)}, region, RmsePolicy::estimated);
  CHECK(std::isnan(none.rmse_u));
  CHECK(none.failure_rate == 1.0);
}

TEST_CASE("experiment report matches its own trial logs") {
  Sweep sw;
  sw.name = "tiny";
  sw.variable = "P_dBm";
  for (double p : {20.0, 30.0}) {
    TrialConfig c;
    c.soundings = 6;
    c.spectrum_samples = 50;
    c.scene.tx_power_w = dbm_to_watts(p);
    sw.points.push_back({p, "", c});
  }
  ExperimentOptions o;
  o.trials = 6;
  o.seed = 3;
  o.keep_trials = true;
  const ExperimentReport rep = run_experiment(sw, o);
  REQUIRE(rep.rows.size() == 2);
  REQUIRE(rep.trials.size() == 2);
  for (std::size_t p = 0; p < 2; ++p) {
    const auto& trials = rep.trials[p];
    REQUIRE(trials.size() == 6);
    int ok = 0;
    double se = 0.0;
    for (const auto& t : trials) {
      if (!t.estimate) continue;
      ++ok;
      se += std::pow(distance(*t.estimate, t.ue_true), 2);
    }
    CHECK(rep.rows[p].failures + ok == 6);
    if (ok > 0) CHECK(rep.rows[p].rmse_u == doctest::Approx(std::sqrt(se / ok)));
  }
  // Paired seeds: the same UE positions at every sweep point.
  for (int t = 0; t < 6; ++t) CHECK(rep.trials[0][t].ue_true == rep.trials[1][t].ue_true);

  std::ostringstream a, b;
  write_csv(rep, a);
  o.workers = 3;
  o.keep_trials = false;
  write_csv(run_experiment(sw, o), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("P_dBm,RMSE_u_m,RMSE_phi_ris1_rad,RMSE_theta_ris1_rad,failure_rate,trials\n", 0) == 0);
}

TEST_CASE("spectrum csv layout") {
  SpectrumGrid g;
  g.azimuths = {0.0, 1.0};
  g.elevations = {0.5};
  g.values = Eigen::MatrixXd::Constant(1, 2, 2.0);
  std::ostringstream out;
  write_spectrum_csv(g, out);
  CHECK(out.str() == "phi,theta,P\n0,0.5,2\n1,0.5,2\n");
}

TEST_CASE("recipes") {
  const RunConfig base;
  CHECK(recipe_names().size() == 5);
  auto s = build_recipe("power-sweep", base, {});
  REQUIRE(s.size() == 2);
  CHECK(s[0].points.size() == 16);
  RecipeOverrides o;
  o.phase_mode = PhaseMode::one_bit;
  o.powers_dbm = {10, 20};
  s = build_recipe("power-sweep", base, o);
  REQUIRE(s.size() == 1);
  CHECK(s[0].points.size() == 2);
  CHECK(s[0].points[0].config.scene.phase_mode == PhaseMode::one_bit);

  s = build_recipe("refpoint-sweep", base, {});
  REQUIRE(s.size() == 4);
  for (const auto& sw : s) CHECK_FALSE(sw.points.empty());
  CHECK(s[2].points[0].config.scene.ris_panels.size() == 4);

  s = build_recipe("sounding-sweep", base, {});
  CHECK(s.size() == 4);
  CHECK(s[0].variable == "B");
  CHECK_THROWS(build_recipe("spectrum", base, {}));
  CHECK_THROWS(build_recipe("nonsense", base, {}));
}
