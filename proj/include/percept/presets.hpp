#pragma once

#include "percept/eval.hpp"
#include "percept/scene.hpp"

#include <string>

namespace percept {

struct Preset {
  std::string name;
  Scene scene;
  Scenario scenario{Scenario::kAcc};
  int default_scans{100};
  std::string sensor_profile{"16"};
};

/// Bundled scenario presets: acc_follow, lane_change_dense,
/// left_turn_oncoming, beacon_lane, overhang_street, urban.
Preset build_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace percept
