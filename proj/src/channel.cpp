#include "risloc/channel.hpp"

#include <cmath>
#include <string>

#include "risloc/errors.hpp"

namespace risloc {

namespace {

constexpr double kFourPi = 4.0 * kPi;

Complex propagation_phase(double path_length, double wavelength) {
  return std::polar(1.0, -kTwoPi * path_length / wavelength);
}

void require_distinct(const Point3& a, const Point3& b, const char* what) {
  if (!(distance(a, b) > 0.0)) {
    throw DegenerateGeometry(std::string("coincident points: ") + what);
  }
}

}  // namespace

PhaseMode parse_phase_mode(std::string_view text) {
  if (text == "continuous") return PhaseMode::continuous;
  if (text == "one-bit" || text == "one_bit") return PhaseMode::one_bit;
  throw ConfigError("unknown phase mode '" + std::string(text) + "'");
}

std::string_view to_string(PhaseMode mode) {
  return mode == PhaseMode::continuous ? "continuous" : "one-bit";
}

Wall parse_wall(std::string_view text) {
  if (text == "x_min") return Wall::x_min;
  if (text == "y_min") return Wall::y_min;
  if (text == "x_max") return Wall::x_max;
  if (text == "y_max") return Wall::y_max;
  throw ConfigError("unknown wall '" + std::string(text) + "'");
}

std::string_view to_string(Wall wall) {
  switch (wall) {
    case Wall::x_min: return "x_min";
    case Wall::y_min: return "y_min";
    case Wall::x_max: return "x_max";
    case Wall::y_max: return "y_max";
  }
  return "x_min";
}

PanelFrame wall_frame(Wall wall, const Point3& center) {
  const Vec3 up = Vec3::UnitZ();
  switch (wall) {
    case Wall::x_min: return PanelFrame::make(center, Vec3::UnitY(), up);
    case Wall::y_min: return PanelFrame::make(center, -Vec3::UnitX(), up);
    case Wall::x_max: return PanelFrame::make(center, -Vec3::UnitY(), up);
    case Wall::y_max: return PanelFrame::make(center, Vec3::UnitX(), up);
  }
  throw ConfigError("unknown wall");
}

RisPanel RisPanel::make(const PanelFrame& frame, const ArrayGrid& grid) {
  return RisPanel{frame, grid, CVector::Ones(grid.size())};
}

SceneConfig SceneConfig::standard() {
  SceneConfig scene;
  const double half = scene.wavelength / 2.0;
  scene.ap_grid = ArrayGrid{10, 10, half, half};
  const ArrayGrid ris_grid{10, 10, half, half};
  scene.ris_panels.push_back(RisPanel::make(wall_frame(Wall::x_min, {0.0, 5.0, 2.0}), ris_grid));
  scene.ris_panels.push_back(RisPanel::make(wall_frame(Wall::y_min, {5.0, 0.0, 2.0}), ris_grid));
  scene.tx_power_w = dbm_to_watts(30.0);
  scene.noise_power_w = dbm_to_watts(-83.0);
  return scene;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double radiation_pattern(const AzEl& direction, const PanelFrame& panel) {
  const double cos_beta = unit_direction(direction).dot(panel.normal);
  return cos_beta > 0.0 ? cos_beta : 0.0;
}

Complex los_gain(const Point3& ue, const Point3& ap, double wavelength, double ap_gain) {
  require_distinct(ue, ap, "UE and AP");
  const double d = distance(ue, ap);
  return wavelength * std::sqrt(ap_gain) / (kFourPi * d) * propagation_phase(d, wavelength);
}

Complex scatter_gain(const Scatterer& sc, const Point3& ue, const Point3& ap, double wavelength,
                     double ap_gain) {
  require_distinct(sc.position, ap, "scatterer and AP");
  require_distinct(sc.position, ue, "scatterer and UE");
  const double d_sp = distance(sc.position, ap);
  const double d_su = distance(sc.position, ue);
  const double mag =
      wavelength * std::sqrt(ap_gain * sc.rcs) / (std::pow(kFourPi, 1.5) * d_sp * d_su);
  return mag * propagation_phase(d_sp + d_su, wavelength);
}

Complex ris_element_gain(const RisPanel& panel, const AzEl& ap_dir, const AzEl& ue_dir, double d_rp,
                         double d_ru, double wavelength, double ap_gain) {
  const double area = panel.grid.dx * panel.grid.dy;
  const double scattering_gain = kFourPi * area / (wavelength * wavelength);
  const double pattern =
      radiation_pattern(ap_dir, panel.frame) * radiation_pattern(ue_dir, panel.frame);
  const double mag = wavelength * std::sqrt(area * ap_gain * scattering_gain * pattern) /
                     (std::pow(kFourPi, 1.5) * d_rp * d_ru);
  return mag * propagation_phase(d_rp + d_ru, wavelength);
}

CVector ris_steering(const RisPanel& panel, const AzEl& dir, double wavelength) {
  return steering_vector(panel_aoa(panel.frame, dir, panel.grid.dx, panel.grid.dy, wavelength),
                         panel.grid.nx, panel.grid.ny);
}

Complex ris_total_gain(const RisPanel& panel, Complex element_gain, const AzEl& ap_dir,
                       const AzEl& ue_dir, double wavelength) {
  const CVector a_ap = ris_steering(panel, ap_dir, wavelength);
  const CVector a_ue = ris_steering(panel, ue_dir, wavelength);
  return element_gain * a_ap.dot(panel.phases.cwiseProduct(a_ue));
}

Complex scatter_ris_gain(const Scatterer& sc, const RisPanel& panel, const Point3& ue,
                         const Point3& ap, double wavelength, double ap_gain) {
  require_distinct(sc.position, ue, "scatterer and UE");
  require_distinct(sc.position, panel.center(), "scatterer and surface");
  require_distinct(ap, panel.center(), "AP and surface");
  const double d_su = distance(sc.position, ue);
  const Complex first_leg = std::sqrt(sc.rcs) / (std::sqrt(kFourPi) * d_su) *
                            propagation_phase(d_su, wavelength);
  const AzEl ap_dir = direction_angles(panel.center(), ap);
  const AzEl sc_dir = direction_angles(panel.center(), sc.position);
  const Complex element =
      ris_element_gain(panel, ap_dir, sc_dir, distance(panel.center(), ap),
                       distance(panel.center(), sc.position), wavelength, ap_gain);
  return ris_total_gain(panel, first_leg * element, ap_dir, sc_dir, wavelength);
}

CVector sample_phase_config(const ArrayGrid& grid, PhaseMode mode, Rng& rng) {
  CVector phases(grid.size());
  if (mode == PhaseMode::continuous) {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (auto& xi : phases) xi = std::polar(1.0, angle(rng));
  } else {
    std::bernoulli_distribution flip(0.5);
    for (auto& xi : phases) xi = flip(rng) ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
  }
  return phases;
}

double sample_rcs(double mean, Rng& rng) {
  std::exponential_distribution<double> dist(1.0 / mean);
  return dist(rng);
}

void validate_far_field(const SceneConfig& scene) {
  for (std::size_t l = 0; l < scene.ris_panels.size(); ++l) {
    const RisPanel& panel = scene.ris_panels[l];
    const double d0 = rayleigh_distance(panel.grid.aperture(), scene.wavelength);
    const double to_ap = distance(panel.center(), scene.ap_position);
    const double to_ue = distance(panel.center(), scene.ue_position);
    if (to_ap <= d0 || to_ue <= d0) {
      throw ConfigError("surface " + std::to_string(l) + " violates the far-field condition (d0 = " +
                        std::to_string(d0) + " m, AP at " + std::to_string(to_ap) +
                        " m, UE at " + std::to_string(to_ue) + " m)");
    }
  }
}

std::vector<Point3> sample_scatterer_positions(const SceneConfig& scene, int count,
                                               double min_separation, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, scene.room.x);
  std::uniform_real_distribution<double> uy(0.0, scene.room.y);
  std::uniform_real_distribution<double> uz(0.0, scene.room.z);
  std::vector<Point3> anchors{scene.ap_position, scene.ue_position};
  for (const auto& panel : scene.ris_panels) anchors.push_back(panel.center());

  std::vector<Point3> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    const Point3 p{ux(rng), uy(rng), uz(rng)};
    bool ok = true;
    for (const auto& a : anchors) ok = ok && distance(p, a) >= min_separation;
    if (ok) out.push_back(p);
  }
  return out;
}

SynthesisResult synthesize_sounding(const SceneConfig& scene, int index, Rng& rng) {
  if (scene.enforce_far_field) validate_far_field(scene);
  const double lambda = scene.wavelength;
  const ArrayGrid& ap = scene.ap_grid;

  SynthesisResult out;
  out.sounding.index = index;

  std::vector<RisPanel> panels = scene.ris_panels;
  for (auto& panel : panels) {
    panel.phases = sample_phase_config(panel.grid, scene.phase_mode, rng);
    out.sounding.ris_phases.push_back(panel.phases);
  }

  auto aoa_from_ap = [&](const Point3& source) {
    return normalized_aoa(direction_angles(scene.ap_position, source), ap.dx, ap.dy, lambda);
  };

  if (!scene.los_blocked) {
    out.paths.push_back({PathType::los,
                         los_gain(scene.ue_position, scene.ap_position, lambda, scene.ap_gain),
                         aoa_from_ap(scene.ue_position), std::nullopt});
  }
  for (const auto& pos : scene.scatterers) {
    const Scatterer sc{pos, sample_rcs(scene.mean_rcs, rng)};
    out.paths.push_back({PathType::scattered,
                         scatter_gain(sc, scene.ue_position, scene.ap_position, lambda,
                                      scene.ap_gain),
                         aoa_from_ap(pos), std::nullopt});
  }
  for (std::size_t l = 0; l < panels.size(); ++l) {
    const RisPanel& panel = panels[l];
    const AzEl ap_dir = direction_angles(panel.center(), scene.ap_position);
    const AzEl ue_dir = direction_angles(panel.center(), scene.ue_position);
    const Complex element = ris_element_gain(panel, ap_dir, ue_dir,
                                             distance(panel.center(), scene.ap_position),
                                             distance(panel.center(), scene.ue_position), lambda,
                                             scene.ap_gain);
    out.paths.push_back({PathType::ris, ris_total_gain(panel, element, ap_dir, ue_dir, lambda),
                         aoa_from_ap(panel.center()), static_cast<int>(l)});
  }
  for (const auto& rs : scene.ris_scatterers) {
    if (rs.ris_index < 0 || rs.ris_index >= static_cast<int>(panels.size())) {
      throw ConfigError("type-4 scatterer references a missing surface");
    }
    const RisPanel& panel = panels[rs.ris_index];
    const Scatterer sc{rs.position, sample_rcs(scene.mean_rcs, rng)};
    out.paths.push_back(
        {PathType::scatter_ris,
         scatter_ris_gain(sc, panel, scene.ue_position, scene.ap_position, lambda, scene.ap_gain),
         aoa_from_ap(panel.center()), rs.ris_index});
  }

  CVector h = CVector::Zero(ap.size());
  for (const auto& p : out.paths) {
    h += p.gain * steering_vector(p.aoa_at_ap, ap.nx, ap.ny);
  }
  h *= std::sqrt(scene.tx_power_w);

  if (scene.noise_power_w > 0.0) {
    std::normal_distribution<double> component(0.0, std::sqrt(scene.noise_power_w / 2.0));
    for (auto& v : h) {
      const double re = component(rng);
      const double im = component(rng);
      v += Complex(re, im);
    }
  }
  out.sounding.h = std::move(h);
  return out;
}

}  // namespace risloc
