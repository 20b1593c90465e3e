#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percept/config.hpp"
#include "percept/errors.hpp"

#include <sstream>

using namespace percept;

TEST_CASE("config text round trip") {
  PipelineConfig config;
  std::stringstream text;
  text << "ground.cell_size = 0.4\n";
  text << "# a comment line\n";
  text << "clustering.channel_lookback = 5   # trailing comment\n";
  text << "tracker.yaw_meas_sigma_deg = 7.5\n";
  text << "sensor.profile = 64\n";
  apply_config_text(config, text, "test");
  CHECK(config.ground.cell_size_m == doctest::Approx(0.4));
  CHECK(config.clustering.channel_lookback == 5);
  CHECK(config.tracker.filter.yaw_meas_sigma == doctest::Approx(deg_to_rad(7.5)));
  CHECK(config.sensor_profile == "64");

  std::stringstream dump;
  dump_config(dump, config);
  PipelineConfig reloaded;
  std::stringstream dump_in(dump.str());
  apply_config_text(reloaded, dump_in, "dump");
  std::stringstream dump2;
  dump_config(dump2, reloaded);
  CHECK(dump.str() == dump2.str());
}

TEST_CASE("unknown keys are rejected with location") {
  PipelineConfig config;
  std::stringstream text;
  text << "ground.cell_size = 0.5\n";
  text << "ground.not_a_key = 1\n";
  try {
    apply_config_text(config, text, "cfg");
    FAIL("expected config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cfg:2") != std::string::npos);
    CHECK(msg.find("not_a_key") != std::string::npos);
  }
}

TEST_CASE("malformed values and lines are rejected") {
  PipelineConfig config;
  std::stringstream bad_value("ground.cell_size = fast\n");
  CHECK_THROWS_AS(apply_config_text(config, bad_value, "v"), ConfigError);

  PipelineConfig config2;
  std::stringstream bad_line("ground.cell_size 0.5\n");
  CHECK_THROWS_AS(apply_config_text(config2, bad_line, "l"), ConfigError);
}

TEST_CASE("values are validated against module invariants at load") {
  PipelineConfig config;
  std::stringstream text;
  text << "clustering.breakpoint_angle_deg = 0.1\n";  // below the azimuth step
  CHECK_THROWS_AS(apply_config_text(config, text, "inv"), ValidationError);

  PipelineConfig config2;
  std::stringstream text2;
  text2 << "compression.z_bin = 0.01\n";  // bin count > 64
  CHECK_THROWS_AS(apply_config_text(config2, text2, "inv2"), ValidationError);

  PipelineConfig config3;
  std::stringstream text3;
  text3 << "stationary.tau_existent = -2\n";  // below tau_nonexistent
  CHECK_THROWS_AS(apply_config_text(config3, text3, "inv3"), ValidationError);
}

TEST_CASE("defaults validate") {
  PipelineConfig config;
  CHECK_NOTHROW(config.validate());
}
