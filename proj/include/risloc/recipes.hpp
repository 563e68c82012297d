#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risloc/config.hpp"
#include "risloc/harness.hpp"

namespace risloc {

/// Command-line adjustments applied on top of a loaded config.
struct RecipeOverrides {
  std::optional<PhaseMode> phase_mode;
  std::optional<int> soundings;
  std::optional<int> samples_per_half_pi;
  /// Replaces the recipe's own power grid when non-empty.
  std::vector<double> powers_dbm;
};

const std::vector<std::string>& recipe_names();

/// Applies phase mode, B and N overrides.
RunConfig apply_overrides(RunConfig config, const RecipeOverrides& overrides);

/// Sweeps for a Monte Carlo recipe (every recipe except `spectrum`); one CSV per sweep.
/// Throws ConfigError for an unknown name.
std::vector<Sweep> build_recipe(std::string_view name, const RunConfig& base,
                                const RecipeOverrides& overrides);

struct SpectrumSnapshot {
  double power_dbm = 0.0;
  AzEl truth;
  std::optional<AzEl> estimate;
  std::optional<SpectrumGrid> grid;
};

/// First surface's pseudo spectrum for one seeded scene at each transmit power
/// (default 0, 10, 20, 30 dBm). A missing grid means too few soundings were identified.
std::vector<SpectrumSnapshot> run_spectrum_recipe(const RunConfig& base,
                                                  const RecipeOverrides& overrides,
                                                  std::uint64_t seed);

}  // namespace risloc
