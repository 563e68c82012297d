#include <doctest.h>

#include <cmath>

#include "risloc/config.hpp"
#include "risloc/errors.hpp"

using namespace risloc;

TEST_CASE("defaults survive a dump and parse round trip") {
  const RunConfig d;
  const RunConfig back = parse_config(dump_config(d));
  CHECK(dump_config(back) == dump_config(d));
  CHECK(back.ris.size() == 2);
  CHECK(back.ris[1].wall == Wall::y_min);
  CHECK(back.type2_count.min == 3);
  CHECK(back.type2_count.max == 5);
  CHECK(back.noise_dbm == -83.0);
  CHECK(parse_config("{}").soundings == 30);
}

TEST_CASE("partial documents keep other defaults") {
  const RunConfig c = parse_config(R"({"power": {"tx_dbm": 12.5}, "soundings": 8,
                                       "scatterers": {"type2_count": 0},
                                       "ue": {"position_m": [4.5, 5.5, 1.0]}})");
  CHECK(c.tx_dbm == 12.5);
  CHECK(c.noise_dbm == -83.0);
  CHECK(c.soundings == 8);
  CHECK(c.type2_count.min == 0);
  CHECK(c.type2_count.max == 0);
  CHECK(c.type4_count.max == 5);
  REQUIRE(c.ue_position);
  const TrialConfig t = c.to_trial();
  CHECK(t.soundings == 8);
  CHECK(t.pinned_ue->x == 4.5);
  CHECK(t.scene.ris_panels.size() == 2);
  CHECK(t.scene.tx_power_w == doctest::Approx(std::pow(10.0, (12.5 - 30) / 10)));
}

TEST_CASE("null noise disables noise") {
  const RunConfig c = parse_config(R"({"power": {"noise_dbm": null}})");
  CHECK(c.to_trial().scene.noise_power_w == 0.0);
  CHECK(parse_config(dump_config(c)).to_trial().scene.noise_power_w == 0.0);
}

TEST_CASE("bad documents are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sondings": 4})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"nomp": {"max_path": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"soundings": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"soundings": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ris": [{"center_m": [0, 5, 2], "wall": "ceiling"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ris": [{"center_m": [0, 5], "wall": "x_min"}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"phase_mode": "two-bit"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scatterers": {"type2_count": [4, 2]}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/risloc.json"), ConfigError);
}
