#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace percept {

/// Rotating multi-beam sensor characteristics. Angular step sizes define the
/// discrete grid of the scan container; the timing model is linear in azimuth.
struct SensorConfig {
  int n_layers{16};
  int n_channels{1800};
  double azimuth_step_deg{0.2};           // n_channels * azimuth_step_deg == 360
  std::vector<double> elevation_deg;      // per layer, strictly monotone
  int n_slices{2};                        // returns per firing
  double rotation_period_s{0.1};
  double mount_height_m{2.0};
  double max_range_m{50.0};

  void validate() const;

  /// Time offset of a firing since scan start, shared by all layers/slices of
  /// the channel.
  double timestamp_of(int channel) const {
    return rotation_period_s * static_cast<double>(channel) / static_cast<double>(n_channels);
  }
};

/// 16-layer desk profile: 0.2 deg azimuth, elevations uniform in [-15, +3].
SensorConfig sensor_profile_16();
/// 64-layer profile for runtime benchmarking: elevations uniform in [-24, +2].
SensorConfig sensor_profile_64();
SensorConfig sensor_profile(const std::string& name);

}  // namespace percept
