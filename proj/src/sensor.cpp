#include "percept/sensor.hpp"

#include <cmath>

namespace percept {

void SensorConfig::validate() const {
  if (n_layers <= 0 || n_channels <= 0 || n_slices <= 0)
    throw std::invalid_argument("sensor: counts must be positive");
  if (std::abs(n_channels * azimuth_step_deg - 360.0) > 1e-9)
    throw std::invalid_argument("sensor: n_channels * azimuth_step_deg must equal 360");
  if (static_cast<int>(elevation_deg.size()) != n_layers)
    throw std::invalid_argument("sensor: elevation table size mismatch");
  for (size_t i = 1; i < elevation_deg.size(); ++i)
    if (elevation_deg[i] <= elevation_deg[i - 1])
      throw std::invalid_argument("sensor: elevation table must be strictly monotone");
  if (rotation_period_s <= 0.0)
    throw std::invalid_argument("sensor: rotation period must be positive");
  if (mount_height_m <= 0.0 || max_range_m <= 0.0)
    throw std::invalid_argument("sensor: mount height and max range must be positive");
}

static std::vector<double> uniform_elevations(int n, double lo, double hi) {
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return e;
}

SensorConfig sensor_profile_16() {
  SensorConfig c;
  c.n_layers = 16;
  c.n_channels = 1800;
  c.azimuth_step_deg = 0.2;
  c.elevation_deg = uniform_elevations(16, -15.0, 3.0);
  c.n_slices = 2;
  c.rotation_period_s = 0.1;
  c.mount_height_m = 2.0;
  c.max_range_m = 50.0;
  c.validate();
  return c;
}

SensorConfig sensor_profile_64() {
  SensorConfig c;
  c.n_layers = 64;
  c.n_channels = 1800;
  c.azimuth_step_deg = 0.2;
  c.elevation_deg = uniform_elevations(64, -24.0, 2.0);
  c.n_slices = 2;
  c.rotation_period_s = 0.1;
  c.mount_height_m = 2.0;
  c.max_range_m = 100.0;
  c.validate();
  return c;
}

SensorConfig sensor_profile(const std::string& name) {
  if (name == "16") return sensor_profile_16();
  if (name == "64") return sensor_profile_64();
  throw std::invalid_argument("unknown sensor profile: " + name);
}

}  // namespace percept
