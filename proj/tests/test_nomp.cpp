#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "risloc/nomp.hpp"

using namespace risloc;

namespace {

const ArrayGrid kShape{10, 10, 0.5, 0.5};

CVector tone(Complex g, const NormalizedAoa& n) { return g * steering_vector(n, 10, 10); }

CVector noise(double power_per_antenna, std::mt19937_64& rng) {
  std::normal_distribution<double> c(0.0, std::sqrt(power_per_antenna / 2));
  CVector n(100);
  for (auto& v : n) v = Complex(c(rng), c(rng));
  return n;
}

double aoa_error(const NormalizedAoa& a, const NormalizedAoa& b) {
  return std::max(wrap_dist(a.omega, b.omega), wrap_dist(a.psi, b.psi));
}

}  // namespace

TEST_CASE("residual") {
  const NormalizedAoa a{1.1, 2.3}, b{4.0, 0.4};
  const CVector h = tone({0.3, 0.1}, a) + tone({-0.2, 0.5}, b);
  CHECK((residual(h, {}, kShape) - h).norm() == 0.0);
  CHECK(residual(tone({0.3, 0.1}, a), {{{0.3, 0.1}, a}}, kShape).norm() < 1e-14);
  const CVector rest = residual(h, {{{0.3, 0.1}, a}}, kShape);
  CHECK((rest - tone({-0.2, 0.5}, b)).norm() < 1e-12);
}

TEST_CASE("coarse_detect") {
  SUBCASE("on-grid tone") {
    const NormalizedAoa on{kTwoPi * 7 / 40, kTwoPi * 31 / 40};
    Detection d = coarse_detect(steering_vector(on, 10, 10), kShape, 4);
    CHECK(d.path.aoa.omega == doctest::Approx(on.omega).epsilon(1e-12));
    CHECK(d.path.aoa.psi == doctest::Approx(on.psi).epsilon(1e-12));
    CHECK(std::abs(d.path.gain - 1.0) < 1e-12);
    d = coarse_detect(3.0 * steering_vector(on, 10, 10), kShape, 4);
    CHECK(std::abs(d.path.gain - 3.0) < 1e-12);
  }
  SUBCASE("agrees with exhaustive evaluation") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    for (int i = 0; i < 40; ++i) {
      const NormalizedAoa truth{ang(rng), ang(rng)};
      const CVector r = tone(std::polar(1.0, ang(rng)), truth) + 0.1 * noise(1.0, rng);
      const Detection d = coarse_detect(r, kShape, 4);
      const oracle::GridPeak want = oracle::exhaustive_detect(r, 10, 10, 4);
      CHECK(d.objective == doctest::Approx(want.objective).epsilon(1e-10));
      CHECK(aoa_error(d.path.aoa, want.aoa) < 1e-12);
      CHECK(wrap_dist(d.path.aoa.omega, truth.omega) <= kTwoPi / 40);
      CHECK(wrap_dist(d.path.aoa.psi, truth.psi) <= kTwoPi / 40);
    }
  }
}

TEST_CASE("newton_refine") {
  const NormalizedAoa truth{2.0, 5.1};
  const Complex g(0.7, -0.4);
  const CVector r = tone(g, truth);

  const ExtractedPath at_optimum{g, truth};
  const ExtractedPath same = newton_refine(r, at_optimum, kShape, 5);
  CHECK(aoa_error(same.aoa, truth) < 1e-9);
  CHECK(std::abs(same.gain - g) < 1e-9);

  const ExtractedPath start{0.0, {truth.omega + kTwoPi / 40, truth.psi - kTwoPi / 40}};
  const ExtractedPath refined = newton_refine(r, start, kShape, 10);
  CHECK(aoa_error(refined.aoa, truth) < 1e-6);
  CHECK(std::abs(refined.gain - g) / std::abs(g) < 1e-6);
  CHECK(projection_energy(r, refined.aoa, kShape) >= projection_energy(r, start.aoa, kShape));

  const ExtractedPath untouched = newton_refine(r, start, kShape, 0);
  CHECK(untouched.aoa == start.aoa);
  CHECK(untouched.gain == start.gain);
}

TEST_CASE("newton_refine never lowers the objective") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const CVector r = tone(1.0, {ang(rng), ang(rng)}) + tone(0.8, {ang(rng), ang(rng)}) + 0.3 * noise(1.0, rng);
    const ExtractedPath start{0.0, {ang(rng), ang(rng)}};
    double prev = projection_energy(r, start.aoa, kShape);
    ExtractedPath p = start;
    for (int k = 0; k < 6; ++k) {
      p = newton_refine(r, p, kShape, 1);
      const double now = projection_energy(r, p.aoa, kShape);
      CHECK(now >= prev);
      prev = now;
    }
    CHECK(p.aoa.omega >= 0.0);
    CHECK(p.aoa.omega < kTwoPi);
  }
}

TEST_CASE("cyclic_refine") {
  const NormalizedAoa a{1.0, 1.5}, b{4.0, 3.7};
  const CVector h = tone({1.0, 0.2}, a) + tone({0.5, -0.3}, b);

  ExtractedPathSet exact;
  exact.paths = {{{1.0, 0.2}, a}, {{0.5, -0.3}, b}};
  const ExtractedPathSet kept = cyclic_refine(h, exact, kShape, 3);
  CHECK(aoa_error(kept.paths[0].aoa, a) < 1e-9);
  CHECK(aoa_error(kept.paths[1].aoa, b) < 1e-9);
  CHECK(kept.residual_energy < 1e-20);

  ExtractedPathSet coarse;
  CVector r = h;
  for (int k = 0; k < 2; ++k) {
    const Detection d = coarse_detect(r, kShape, 4);
    coarse.paths.push_back(d.path);
    r -= tone(d.path.gain, d.path.aoa);
  }
  const double before = residual(h, coarse.paths, kShape).squaredNorm();
  const ExtractedPathSet refined = cyclic_refine(h, coarse, kShape, 7);
  CHECK(refined.residual_energy < before);
  CHECK(refined.residual_energy == doctest::Approx(residual(h, refined.paths, kShape).squaredNorm()));

  const ExtractedPathSet none = cyclic_refine(h, coarse, kShape, 0);
  for (std::size_t k = 0; k < coarse.paths.size(); ++k) {
    CHECK(none.paths[k].aoa == coarse.paths[k].aoa);
    CHECK(none.paths[k].gain == coarse.paths[k].gain);
  }
}

TEST_CASE("refit_gains matches the normal equations and rejects collinear directions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 20; ++i) {
    std::vector<ExtractedPath> paths;
    std::vector<NormalizedAoa> aoas;
    for (int k = 0; k < 4; ++k) {
      aoas.push_back({ang(rng), ang(rng)});
      paths.push_back({0.0, aoas.back()});
    }
    const CVector h = noise(1.0, rng);
    REQUIRE(refit_gains(h, paths, kShape));
    const CVector want = oracle::normal_equation_gains(h, aoas, 10, 10);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(paths[k].gain - want[k]) < 1e-9);
  }
  std::vector<ExtractedPath> twins{{1.0, {1.0, 1.0}}, {2.0, {1.0, 1.0}}};
  CHECK_FALSE(refit_gains(noise(1.0, rng), twins, kShape));
  CHECK(twins[0].gain == Complex(1.0));
}

TEST_CASE("nomp_extract") {
  NompConfig cfg;

  SUBCASE("noise far below the threshold") {
    std::mt19937_64 rng(1);
    const ExtractedPathSet s = nomp_extract(noise(1e-13, rng), kShape, cfg);
    CHECK(s.paths.empty());
    CHECK(s.energy_trace.size() == 1);
  }
  SUBCASE("single noiseless path") {
    const NormalizedAoa truth{0.913, 4.377};
    const Complex g = std::sqrt(1.0) * Complex(3e-3, -1e-3);
    const ExtractedPathSet s = nomp_extract(tone(g, truth), kShape, cfg);
    REQUIRE(s.paths.size() == 1);
    CHECK(aoa_error(s.paths[0].aoa, truth) < 1e-6);
    CHECK(std::abs(s.paths[0].gain - g) / std::abs(g) < 1e-6);
  }
  SUBCASE("two separated paths at 30 dB SNR") {
    std::mt19937_64 rng(5);
    const NormalizedAoa a{1.0, 2.0};
    const NormalizedAoa b{1.0 + 4 * kTwoPi / 10, 2.0 + 1.0};
    const CVector clean = tone(1e-3, a) + tone(Complex(0, 8e-4), b);
    const double per_antenna_signal = std::norm(8e-4);
    NompConfig c = cfg;
    c.energy_threshold_w = 3.0 * per_antenna_signal * 1e-3 * 100;
    const CVector h = clean + noise(per_antenna_signal * 1e-3, rng);
    const ExtractedPathSet s = nomp_extract(h, kShape, c);
    REQUIRE(s.paths.size() >= 2);
    CHECK(aoa_error(s.paths[0].aoa, a) < 1e-2);
    CHECK(aoa_error(s.paths[1].aoa, b) < 1e-2);
    for (std::size_t k = 1; k < s.energy_trace.size(); ++k) {
      CHECK(s.energy_trace[k] <= s.energy_trace[k - 1]);
    }
  }
  SUBCASE("final gains are least-squares coefficients") {
    std::mt19937_64 rng(8);
    const CVector h = tone(1e-3, {0.5, 0.9}) + tone(5e-4, {3.3, 5.0}) + tone(2e-4, {5.5, 2.2}) +
                      noise(1e-13, rng);
    const ExtractedPathSet s = nomp_extract(h, kShape, cfg);
    REQUIRE(s.paths.size() == 3);
    std::vector<NormalizedAoa> aoas;
    for (const auto& p : s.paths) aoas.push_back(p.aoa);
    const CVector want = oracle::normal_equation_gains(h, aoas, 10, 10);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(s.paths[k].gain - want[k]) < 1e-9 * std::abs(want[k]) + 1e-15);
  }
  SUBCASE("scaling the input scales the gains") {
    const CVector h = tone(1e-3, {0.5, 0.9}) + tone(5e-4, {3.3, 5.0});
    const Complex c(2.0, -1.0);
    const ExtractedPathSet s1 = nomp_extract(h, kShape, cfg);
    const ExtractedPathSet s2 = nomp_extract(c * h, kShape, cfg);
    REQUIRE(s1.paths.size() == s2.paths.size());
    for (std::size_t k = 0; k < s1.paths.size(); ++k) {
      CHECK(aoa_error(s1.paths[k].aoa, s2.paths[k].aoa) < 1e-8);
      CHECK(std::abs(c * s1.paths[k].gain - s2.paths[k].gain) < 1e-8 * std::abs(s2.paths[k].gain));
    }
  }
  SUBCASE("path cap and per-antenna rule") {
    std::mt19937_64 rng(2);
    const CVector h = noise(1e-6, rng);
    NompConfig c = cfg;
    c.max_paths = 3;
    const ExtractedPathSet s = nomp_extract(h, kShape, c);
    CHECK(s.paths.size() <= 3);
    c.energy_rule = EnergyRule::per_antenna;
    c.energy_threshold_w = 2e-6;
    CHECK(nomp_extract(h, kShape, c).paths.empty());
  }
  SUBCASE("residual energy is monotone and AOAs are wrapped") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    for (int i = 0; i < 20; ++i) {
      CVector h = noise(1e-12, rng);
      for (int k = 0; k < 5; ++k) h += tone(std::polar(1e-4 * (k + 1), ang(rng)), {ang(rng), ang(rng)});
      const ExtractedPathSet s = nomp_extract(h, kShape, cfg);
      for (std::size_t k = 1; k < s.energy_trace.size(); ++k) CHECK(s.energy_trace[k] <= s.energy_trace[k - 1]);
      for (const auto& p : s.paths) {
        CHECK(p.aoa.omega >= 0.0);
        CHECK(p.aoa.omega < kTwoPi);
        CHECK(p.aoa.psi >= 0.0);
        CHECK(p.aoa.psi < kTwoPi);
      }
    }
  }
}
