#include "risloc/recipes.hpp"

#include <cstdio>

#include "risloc/errors.hpp"

namespace risloc {

namespace {

std::vector<double> default_powers() {
  std::vector<double> p;
  for (int dbm = 0; dbm <= 30; dbm += 2) p.push_back(dbm);
  return p;
}

std::string power_tag(double dbm) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "P%gdBm", dbm);
  return buf;
}

Sweep power_sweep(std::string name, const RunConfig& config, const std::vector<double>& powers) {
  Sweep sweep{std::move(name), "P_dBm", {}};
  for (double p : powers) {
    RunConfig c = config;
    c.tx_dbm = p;
    sweep.points.push_back({p, "", c.to_trial()});
  }
  return sweep;
}

const std::vector<double>& pick(const std::vector<double>& override_list,
                                const std::vector<double>& fallback) {
  return override_list.empty() ? fallback : override_list;
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"spectrum", "power-sweep", "element-sweep",
                                              "sounding-sweep", "refpoint-sweep"};
  return names;
}

RunConfig apply_overrides(RunConfig config, const RecipeOverrides& overrides) {
  if (overrides.phase_mode) config.phase_mode = *overrides.phase_mode;
  if (overrides.soundings) {
    if (*overrides.soundings < 2) throw ConfigError("B must be at least 2");
    config.soundings = *overrides.soundings;
  }
  if (overrides.samples_per_half_pi) {
    if (*overrides.samples_per_half_pi < 2) throw ConfigError("N must be at least 2");
    config.samples_per_half_pi = *overrides.samples_per_half_pi;
  }
  return config;
}

std::vector<Sweep> build_recipe(std::string_view name, const RunConfig& base,
                                const RecipeOverrides& overrides) {
  const RunConfig config = apply_overrides(base, overrides);
  const std::vector<double> powers = pick(overrides.powers_dbm, default_powers());
  std::vector<Sweep> sweeps;

  if (name == "power-sweep") {
    const std::vector<PhaseMode> modes =
        overrides.phase_mode ? std::vector<PhaseMode>{*overrides.phase_mode}
                             : std::vector<PhaseMode>{PhaseMode::continuous, PhaseMode::one_bit};
    for (PhaseMode mode : modes) {
      RunConfig c = config;
      c.phase_mode = mode;
      std::string tag(to_string(mode));
      for (auto& ch : tag) ch = ch == '-' ? '_' : ch;
      sweeps.push_back(power_sweep("power_sweep_" + tag, c, powers));
    }
  } else if (name == "element-sweep") {
    for (int n : {5, 10, 20}) {
      RunConfig c = config;
      for (auto& r : c.ris) r.nx = r.ny = n;
      c.truncate_subspace = true;
      c.enforce_far_field = false;
      sweeps.push_back(power_sweep("element_sweep_Mr" + std::to_string(n * n), c, powers));
    }
  } else if (name == "sounding-sweep") {
    const std::vector<double> sweep_powers = pick(overrides.powers_dbm, {11.0, 14.0, 17.0, 20.0});
    for (double p : sweep_powers) {
      Sweep sweep{"sounding_sweep_" + power_tag(p), "B", {}};
      for (int b : {2, 5, 10, 15, 20, 25, 30, 35, 40}) {
        RunConfig c = config;
        c.tx_dbm = p;
        c.soundings = b;
        c.los_blocked = true;
        c.use_los_reference = false;
        sweep.points.push_back({static_cast<double>(b), "", c.to_trial()});
      }
      sweeps.push_back(std::move(sweep));
    }
  } else if (name == "refpoint-sweep") {
    struct Scenario {
      const char* tag;
      bool four;
      bool los;
    };
    for (const Scenario s : {Scenario{"2ris", false, false}, Scenario{"2ris_los", false, true},
                             Scenario{"4ris", true, false}, Scenario{"4ris_los", true, true}}) {
      RunConfig c = config;
      if (s.four) {
        const RisPlacement& like = c.ris.empty() ? RisPlacement{} : c.ris.front();
        RisPlacement third = like, fourth = like;
        third.center = {0.0, 3.0, 2.0};
        third.wall = Wall::x_min;
        fourth.center = {3.0, 0.0, 2.0};
        fourth.wall = Wall::y_min;
        c.ris.push_back(third);
        c.ris.push_back(fourth);
        c.enforce_far_field = false;
      }
      c.los_blocked = !s.los;
      c.use_los_reference = s.los;
      sweeps.push_back(power_sweep(std::string("refpoint_sweep_") + s.tag, c, powers));
    }
  } else if (name == "spectrum") {
    throw ConfigError("the spectrum recipe writes grids, use run_spectrum_recipe");
  } else {
    throw ConfigError("unknown recipe '" + std::string(name) + "'");
  }
  return sweeps;
}

std::vector<SpectrumSnapshot> run_spectrum_recipe(const RunConfig& base,
                                                  const RecipeOverrides& overrides,
                                                  std::uint64_t seed) {
  const RunConfig config = apply_overrides(base, overrides);
  if (config.ris.empty()) throw ConfigError("the spectrum recipe needs at least one surface");
  const std::vector<double> powers = pick(overrides.powers_dbm, {0.0, 10.0, 20.0, 30.0});

  std::vector<SpectrumSnapshot> out;
  for (double p : powers) {
    RunConfig c = config;
    c.tx_dbm = p;
    TrialConfig trial = c.to_trial();
    trial.keep_spectra = true;
    Rng rng(trial_seed(seed, 0));
    const TrialResult result = run_trial(trial, rng);

    SpectrumSnapshot snap;
    snap.power_dbm = p;
    if (!result.ris.empty()) {
      snap.truth = result.ris.front().truth;
      snap.estimate = result.ris.front().estimate;
    }
    if (!result.spectra.empty()) snap.grid = result.spectra.front();
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace risloc
