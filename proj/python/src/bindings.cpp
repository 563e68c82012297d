#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>

#include "risloc/config.hpp"
#include "risloc/errors.hpp"
#include "risloc/harness.hpp"
#include "risloc/locate.hpp"
#include "risloc/nomp.hpp"
#include "risloc/recipes.hpp"

namespace py = pybind11;
using namespace risloc;

namespace {

using Triple = std::array<double, 3>;

Point3 point(const Triple& t) { return {t[0], t[1], t[2]}; }
Triple triple(const Point3& p) { return {p.x, p.y, p.z}; }

py::dict trial_dict(const TrialResult& r) {
  py::dict d;
  d["ue_true"] = triple(r.ue_true);
  d["estimate"] = r.estimate ? py::cast(triple(*r.estimate)) : py::none();
  d["status"] = std::string(to_string(r.status));
  py::list ris;
  for (const auto& o : r.ris) {
    py::dict e;
    e["truth"] = std::make_pair(o.truth.azimuth, o.truth.elevation);
    e["estimate"] = o.estimate ? py::cast(std::make_pair(o.estimate->azimuth, o.estimate->elevation))
                               : py::none();
    e["matched_soundings"] = o.matched_soundings;
    ris.append(e);
  }
  d["ris"] = ris;
  d["los_detected"] = r.los_detected;
  return d;
}

py::list report_rows(const ExperimentReport& rep) {
  py::list rows;
  for (const auto& r : rep.rows) {
    py::dict d;
    d[py::str(rep.variable)] = r.label.empty() ? py::cast(r.value) : py::cast(r.label);
    d["rmse_u_m"] = r.rmse_u;
    d["rmse_phi_ris1_rad"] = r.rmse_phi_ris1;
    d["rmse_theta_ris1_rad"] = r.rmse_theta_ris1;
    d["failure_rate"] = r.failure_rate;
    d["trials"] = r.trials;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "RIS-aided indoor localization simulator";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("rayleigh_distance", &rayleigh_distance, py::arg("aperture"), py::arg("wavelength"));
  m.def(
      "direction_angles",
      [](const Triple& from, const Triple& to) {
        const AzEl a = direction_angles(point(from), point(to));
        return std::make_pair(a.azimuth, a.elevation);
      },
      py::arg("origin"), py::arg("target"), "(azimuth, elevation) of target seen from origin.");
  m.def(
      "steering_vector",
      [](double omega, double psi, int mx, int my) { return steering_vector({omega, psi}, mx, my); },
      py::arg("omega"), py::arg("psi"), py::arg("mx"), py::arg("my"));
  m.def(
      "nomp_extract",
      [](const CVector& h, int nx, int ny, double threshold_dbm, int max_paths) {
        NompConfig cfg;
        cfg.energy_threshold_w = dbm_to_watts(threshold_dbm);
        cfg.max_paths = max_paths;
        const ExtractedPathSet s = nomp_extract(h, {nx, ny, 0.5, 0.5}, cfg);
        std::vector<std::tuple<Complex, double, double>> out;
        for (const auto& p : s.paths) out.emplace_back(p.gain, p.aoa.omega, p.aoa.psi);
        return out;
      },
      py::arg("h"), py::arg("nx"), py::arg("ny"), py::arg("threshold_dbm") = -50.0,
      py::arg("max_paths") = 12, "List of (gain, omega, psi) in extraction order.");
  m.def(
      "ls_locate",
      [](const std::vector<std::pair<Triple, std::pair<double, double>>>& refs) {
        std::vector<ReferenceBearing> bs;
        for (const auto& [pos, ang] : refs) bs.push_back({point(pos), {ang.first, ang.second}});
        return triple(ls_locate(bs).u);
      },
      py::arg("references"), "references: [((x, y, z), (azimuth, elevation)), ...]");

  m.def("default_config", [] { return dump_config(RunConfig{}); }, "Default config as JSON text.");
  m.def("recipe_names", &recipe_names);
  m.def(
      "run_trial",
      [](const std::string& config_json, std::uint64_t seed) {
        const TrialConfig c = parse_config(config_json).to_trial();
        Rng rng(seed);
        return trial_dict(run_trial(c, rng));
      },
      py::arg("config_json") = "{}", py::arg("seed") = 1);
  m.def(
      "run_recipe",
      [](const std::string& name, const std::string& config_json, std::uint64_t seed, int trials,
         int workers, std::vector<double> powers_dbm) {
        RecipeOverrides o;
        o.powers_dbm = std::move(powers_dbm);
        ExperimentOptions opt;
        opt.seed = seed;
        opt.trials = trials;
        opt.workers = workers;
        py::dict out;
        std::vector<Sweep> sweeps = build_recipe(name, parse_config(config_json), o);
        for (const auto& sw : sweeps) {
          ExperimentReport rep;
          {
            py::gil_scoped_release release;
            rep = run_experiment(sw, opt);
          }
          out[py::str(sw.name)] = report_rows(rep);
        }
        return out;
      },
      py::arg("name"), py::arg("config_json") = "{}", py::arg("seed") = 1, py::arg("trials") = 10,
      py::arg("workers") = 1, py::arg("powers_dbm") = std::vector<double>{},
      "Runs a Monte Carlo recipe; returns {sweep name: [row dict, ...]}.");
}
