#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "risloc/config.hpp"
#include "risloc/errors.hpp"
#include "risloc/recipes.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_power_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw risloc::ConfigError("bad power value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw risloc::ConfigError("cannot write " + path.string());
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided indoor localization simulator"};
  app.require_subcommand(1);

  std::string recipe;
  std::string config_path;
  std::uint64_t seed = 1;
  int trials = 100;
  std::string out_dir = ".";
  std::string phase_mode;
  int soundings = 0;
  int samples = 0;
  std::string powers;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool drop_failures = false;

  CLI::App* run = app.add_subcommand("run", "Run an experiment recipe and write CSV reports");
  run->add_option("recipe", recipe, "spectrum | power-sweep | element-sweep | sounding-sweep | refpoint-sweep")
      ->required();
  run->add_option("--config", config_path, "JSON config file (defaults used when omitted)");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--trials", trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--phase-mode", phase_mode, "continuous | one-bit");
  run->add_option("--B", soundings, "Channel soundings per trial");
  run->add_option("--N", samples, "Spectrum samples per pi/2");
  run->add_option("--power-dbm", powers, "Comma separated transmit powers, dBm");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--failures-at-prior", drop_failures,
                "Count failed trials at the UE-region center in RMSE(u)");

  CLI::App* dump = app.add_subcommand("config", "Print the effective config as JSON");
  dump->add_option("--config", config_path, "JSON config file");

  CLI11_PARSE(app, argc, argv);

  try {
    const risloc::RunConfig config =
        config_path.empty() ? risloc::RunConfig{} : risloc::load_config(config_path);
    if (dump->parsed()) {
      std::cout << risloc::dump_config(config);
      return 0;
    }

    risloc::RecipeOverrides overrides;
    if (!phase_mode.empty()) overrides.phase_mode = risloc::parse_phase_mode(phase_mode);
    if (soundings > 0) overrides.soundings = soundings;
    if (samples > 0) overrides.samples_per_half_pi = samples;
    if (!powers.empty()) overrides.powers_dbm = parse_power_list(powers);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (recipe == "spectrum") {
      for (const auto& snap : risloc::run_spectrum_recipe(config, overrides, seed)) {
        std::ostringstream name;
        name << "spectrum_P" << snap.power_dbm << "dBm.csv";
        if (!snap.grid) {
          std::cerr << name.str() << ": surface 1 was not identified often enough, skipped\n";
          continue;
        }
        std::ostringstream body;
        risloc::write_spectrum_csv(*snap.grid, body);
        write_file(out / name.str(), body.str());
        std::cout << (out / name.str()).string() << '\n';
      }
      return 0;
    }

    risloc::ExperimentOptions options;
    options.trials = trials;
    options.seed = seed;
    options.workers = workers;
    options.policy =
        drop_failures ? risloc::RmsePolicy::failures_at_prior : risloc::RmsePolicy::estimated;
    for (const auto& sweep : risloc::build_recipe(recipe, config, overrides)) {
      const risloc::ExperimentReport report = risloc::run_experiment(sweep, options);
      std::ostringstream body;
      risloc::write_csv(report, body);
      const fs::path file = out / (sweep.name + ".csv");
      write_file(file, body.str());
      std::cout << file.string() << '\n';
    }
  } catch (const risloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
