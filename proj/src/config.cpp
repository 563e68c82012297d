#include "risloc/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "risloc/errors.hpp"

namespace risloc {

namespace {

using nlohmann::json;

// Reads members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;
  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(path(key) + ": wrong type");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Point3 to_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    throw ConfigError(where + ": expected numbers");
  }
}

void read_point(ObjectReader& r, const std::string& key, Point3& out) {
  if (const json* v = r.find(key)) out = to_point(*v, r.path(key));
}

void read_elements(ObjectReader& r, const std::string& key, int& nx, int& ny) {
  const json* v = r.find(key);
  if (!v) return;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
      !(*v)[1].is_number_integer()) {
    throw ConfigError(r.path(key) + ": expected [nx, ny]");
  }
  nx = (*v)[0].get<int>();
  ny = (*v)[1].get<int>();
}

void read_range(ObjectReader& r, const std::string& key, CountRange& out) {
  const json* v = r.find(key);
  if (!v) return;
  if (v->is_number_integer()) {
    out.min = out.max = v->get<int>();
  } else if (v->is_array() && v->size() == 2 && (*v)[0].is_number_integer() &&
             (*v)[1].is_number_integer()) {
    out.min = (*v)[0].get<int>();
    out.max = (*v)[1].get<int>();
  } else {
    throw ConfigError(r.path(key) + ": expected n or [min, max]");
  }
}

EnergyRule parse_energy_rule(const std::string& text, const std::string& where) {
  if (text == "total") return EnergyRule::total;
  if (text == "per_antenna" || text == "per-antenna") return EnergyRule::per_antenna;
  throw ConfigError(where + ": unknown energy rule '" + text + "'");
}

std::string_view to_string(EnergyRule rule) {
  return rule == EnergyRule::total ? "total" : "per_antenna";
}

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.frequency_hz > 0.0, "frequency_hz must be positive");
  require(c.room.x > 0.0 && c.room.y > 0.0 && c.room.z > 0.0, "room size must be positive");
  require(c.ap_nx >= 1 && c.ap_ny >= 1, "ap.elements must be positive");
  require(c.ap_spacing_wavelengths > 0.0, "ap.spacing_wavelengths must be positive");
  for (const auto& r : c.ris) {
    require(r.nx >= 1 && r.ny >= 1, "ris.elements must be positive");
    require(r.element_size_wavelengths > 0.0, "ris.element_size_wavelengths must be positive");
  }
  require(c.type2_count.min >= 0 && c.type2_count.min <= c.type2_count.max,
          "scatterers.type2_count must satisfy 0 <= min <= max");
  require(c.type4_count.min >= 0 && c.type4_count.min <= c.type4_count.max,
          "scatterers.type4_count must satisfy 0 <= min <= max");
  require(c.mean_rcs_m2 > 0.0, "scatterers.mean_rcs_m2 must be positive");
  require(c.scatterer_min_separation_m >= 0.0, "scatterers.min_separation_m must be >= 0");
  require(c.max_paths >= 1, "nomp.max_paths must be >= 1");
  require(c.single_refinements >= 0 && c.cyclic_refinements >= 0,
          "nomp refinement counts must be >= 0");
  require(c.oversampling >= 1, "nomp.oversampling must be >= 1");
  require(c.match_threshold > 0.0, "identification.match_threshold must be positive");
  require(c.samples_per_half_pi >= 2, "spectrum.samples_per_half_pi must be >= 2");
  require(c.soundings >= 2, "soundings must be >= 2");
  for (int axis = 0; axis < 3; ++axis) {
    require(c.ue_region.min.vec()[axis] <= c.ue_region.max.vec()[axis],
            "ue.region_min_m must not exceed ue.region_max_m");
  }
}

}  // namespace

TrialConfig RunConfig::to_trial() const {
  TrialConfig t;
  SceneConfig& s = t.scene;
  s = SceneConfig{};
  s.wavelength = kSpeedOfLight / frequency_hz;
  s.room = room;
  s.ap_position = ap_position;
  const double ap_spacing = ap_spacing_wavelengths * s.wavelength;
  s.ap_grid = ArrayGrid{ap_nx, ap_ny, ap_spacing, ap_spacing};
  s.ap_gain = std::pow(10.0, ap_gain_dbi / 10.0);
  for (const auto& r : ris) {
    const double size = r.element_size_wavelengths * s.wavelength;
    s.ris_panels.push_back(RisPanel::make(wall_frame(r.wall, r.center), {r.nx, r.ny, size, size}));
  }
  s.ue_position = ue_position.value_or(
      Point3::from(0.5 * (ue_region.min.vec() + ue_region.max.vec())));
  s.mean_rcs = mean_rcs_m2;
  s.tx_power_w = dbm_to_watts(tx_dbm);
  s.noise_power_w = std::isinf(noise_dbm) && noise_dbm < 0 ? 0.0 : dbm_to_watts(noise_dbm);
  s.los_blocked = los_blocked;
  s.phase_mode = phase_mode;
  s.enforce_far_field = enforce_far_field;

  t.nomp.max_paths = max_paths;
  t.nomp.energy_threshold_w = dbm_to_watts(energy_threshold_dbm);
  t.nomp.energy_rule = energy_rule;
  t.nomp.single_rounds = single_refinements;
  t.nomp.cyclic_rounds = cyclic_refinements;
  t.nomp.oversampling = oversampling;

  t.soundings = soundings;
  t.spectrum_samples = samples_per_half_pi;
  t.match_threshold = match_threshold;
  t.aoa.interpolate = interpolate;
  t.aoa.truncate_subspace = truncate_subspace;
  t.use_los_reference = use_los_reference;
  t.ue_region = ue_region;
  t.pinned_ue = ue_position;
  t.scattered_paths = type2_count;
  t.ris_scattered_paths = type4_count;
  t.scatterer_min_separation = scatterer_min_separation_m;
  return t;
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  {
    ObjectReader r(root, "config");
    r.get("frequency_hz", c.frequency_hz);
    if (const json* room = r.find("room")) {
      ObjectReader rr(*room, r.path("room"));
      Point3 size{c.room.x, c.room.y, c.room.z};
      read_point(rr, "size_m", size);
      c.room = {size.x, size.y, size.z};
    }
    if (const json* ap = r.find("ap")) {
      ObjectReader ar(*ap, r.path("ap"));
      read_point(ar, "position_m", c.ap_position);
      read_elements(ar, "elements", c.ap_nx, c.ap_ny);
      ar.get("spacing_wavelengths", c.ap_spacing_wavelengths);
      ar.get("gain_dbi", c.ap_gain_dbi);
    }
    if (const json* ris = r.find("ris")) {
      if (!ris->is_array()) throw ConfigError("config.ris: expected a list");
      c.ris.clear();
      for (std::size_t i = 0; i < ris->size(); ++i) {
        ObjectReader pr((*ris)[i], "config.ris[" + std::to_string(i) + "]");
        RisPlacement placement;
        const json* center = pr.find("center_m");
        const json* wall = pr.find("wall");
        if (!center || !wall) throw ConfigError("config.ris entries need center_m and wall");
        placement.center = to_point(*center, pr.path("center_m"));
        if (!wall->is_string()) throw ConfigError(pr.path("wall") + ": expected a string");
        placement.wall = parse_wall(wall->get<std::string>());
        read_elements(pr, "elements", placement.nx, placement.ny);
        pr.get("element_size_wavelengths", placement.element_size_wavelengths);
        c.ris.push_back(placement);
      }
    }
    if (const json* ue = r.find("ue")) {
      ObjectReader ur(*ue, r.path("ue"));
      read_point(ur, "region_min_m", c.ue_region.min);
      read_point(ur, "region_max_m", c.ue_region.max);
      if (const json* pos = ur.find("position_m"); pos && !pos->is_null()) {
        c.ue_position = to_point(*pos, ur.path("position_m"));
      }
    }
    r.get("los_blocked", c.los_blocked);
    if (const json* sc = r.find("scatterers")) {
      ObjectReader sr(*sc, r.path("scatterers"));
      read_range(sr, "type2_count", c.type2_count);
      read_range(sr, "type4_count", c.type4_count);
      sr.get("mean_rcs_m2", c.mean_rcs_m2);
      sr.get("min_separation_m", c.scatterer_min_separation_m);
    }
    if (const json* pw = r.find("power")) {
      ObjectReader wr(*pw, r.path("power"));
      wr.get("tx_dbm", c.tx_dbm);
      if (const json* noise = wr.find("noise_dbm")) {
        if (noise->is_null()) {
          c.noise_dbm = -std::numeric_limits<double>::infinity();
        } else {
          wr.get("noise_dbm", c.noise_dbm);
        }
      }
    }
    if (const json* nomp = r.find("nomp")) {
      ObjectReader nr(*nomp, r.path("nomp"));
      nr.get("max_paths", c.max_paths);
      nr.get("energy_threshold_dbm", c.energy_threshold_dbm);
      std::string rule(to_string(c.energy_rule));
      nr.get("energy_rule", rule);
      c.energy_rule = parse_energy_rule(rule, nr.path("energy_rule"));
      nr.get("single_refinements", c.single_refinements);
      nr.get("cyclic_refinements", c.cyclic_refinements);
      nr.get("oversampling", c.oversampling);
    }
    if (const json* id = r.find("identification")) {
      ObjectReader ir(*id, r.path("identification"));
      ir.get("match_threshold", c.match_threshold);
    }
    if (const json* sp = r.find("spectrum")) {
      ObjectReader sr(*sp, r.path("spectrum"));
      sr.get("samples_per_half_pi", c.samples_per_half_pi);
      sr.get("interpolate", c.interpolate);
      sr.get("truncate_subspace", c.truncate_subspace);
    }
    r.get("soundings", c.soundings);
    std::string mode(to_string(c.phase_mode));
    r.get("phase_mode", mode);
    c.phase_mode = parse_phase_mode(mode);
    r.get("use_los_reference", c.use_los_reference);
    r.get("enforce_far_field", c.enforce_far_field);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const RunConfig& c) {
  json ris = json::array();
  for (const auto& r : c.ris) {
    ris.push_back({{"center_m", point_json(r.center)},
                   {"wall", std::string(to_string(r.wall))},
                   {"elements", {r.nx, r.ny}},
                   {"element_size_wavelengths", r.element_size_wavelengths}});
  }
  json ue = {{"region_min_m", point_json(c.ue_region.min)},
             {"region_max_m", point_json(c.ue_region.max)},
             {"position_m", c.ue_position ? point_json(*c.ue_position) : json(nullptr)}};
  json noise = std::isinf(c.noise_dbm) ? json(nullptr) : json(c.noise_dbm);
  json root = {
      {"frequency_hz", c.frequency_hz},
      {"room", {{"size_m", json::array({c.room.x, c.room.y, c.room.z})}}},
      {"ap",
       {{"position_m", point_json(c.ap_position)},
        {"elements", {c.ap_nx, c.ap_ny}},
        {"spacing_wavelengths", c.ap_spacing_wavelengths},
        {"gain_dbi", c.ap_gain_dbi}}},
      {"ris", ris},
      {"ue", ue},
      {"los_blocked", c.los_blocked},
      {"scatterers",
       {{"type2_count", {c.type2_count.min, c.type2_count.max}},
        {"type4_count", {c.type4_count.min, c.type4_count.max}},
        {"mean_rcs_m2", c.mean_rcs_m2},
        {"min_separation_m", c.scatterer_min_separation_m}}},
      {"power", {{"tx_dbm", c.tx_dbm}, {"noise_dbm", noise}}},
      {"nomp",
       {{"max_paths", c.max_paths},
        {"energy_threshold_dbm", c.energy_threshold_dbm},
        {"energy_rule", std::string(to_string(c.energy_rule))},
        {"single_refinements", c.single_refinements},
        {"cyclic_refinements", c.cyclic_refinements},
        {"oversampling", c.oversampling}}},
      {"identification", {{"match_threshold", c.match_threshold}}},
      {"spectrum",
       {{"samples_per_half_pi", c.samples_per_half_pi},
        {"interpolate", c.interpolate},
        {"truncate_subspace", c.truncate_subspace}}},
      {"soundings", c.soundings},
      {"phase_mode", std::string(to_string(c.phase_mode))},
      {"use_los_reference", c.use_los_reference},
      {"enforce_far_field", c.enforce_far_field},
  };
  return root.dump(2) + "\n";
}

}  // namespace risloc
