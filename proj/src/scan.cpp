#include "percept/scan.hpp"

#include <cstring>

namespace percept {

SphericalScan::SphericalScan(const SensorConfig& config, int64_t scan_index, double t_start)
    : config_(config), scan_index_(scan_index), t_start_(t_start) {
  config_.validate();
  const size_t n = static_cast<size_t>(config_.n_layers) * config_.n_channels * config_.n_slices;
  cells_.assign(n, Measurement{});
  attrs_.assign(n, AttributeSet{});
}

bool SphericalScan::insert(const LogicalPosition& p, const Measurement& m) {
  Measurement& cell = cells_[index_of(p)];
  if (cell.valid) return false;
  cell = m;
  return true;
}

std::optional<LogicalPosition> SphericalScan::position_of(double azimuth_deg, double elevation_deg,
                                                          int target_index) const {
  if (target_index < 0 || target_index >= config_.n_slices) return std::nullopt;
  const double wrapped = wrap_deg_360(azimuth_deg);
  int channel = static_cast<int>(std::floor(wrapped / config_.azimuth_step_deg));
  if (channel >= config_.n_channels) channel = 0;  // wrapped == 360 after rounding

  const auto& table = config_.elevation_deg;
  int best = 0;
  double best_dist = std::abs(elevation_deg - table[0]);
  for (int i = 1; i < config_.n_layers; ++i) {
    const double d = std::abs(elevation_deg - table[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  // Local spacing: distance to the nearer adjacent table entry.
  double spacing;
  if (config_.n_layers == 1) {
    spacing = 1e9;
  } else if (best == 0) {
    spacing = table[1] - table[0];
  } else if (best == config_.n_layers - 1) {
    spacing = table[best] - table[best - 1];
  } else {
    spacing = std::min(table[best] - table[best - 1], table[best + 1] - table[best]);
  }
  if (best_dist > 0.5 * spacing + 1e-12) return std::nullopt;
  return LogicalPosition{best, channel, target_index};
}

std::vector<LogicalPosition> SphericalScan::neighbors(const LogicalPosition& p, int channel_window,
                                                      int layer_window) const {
  std::vector<LogicalPosition> out;
  if (channel_window < 0 || layer_window < 0) return out;
  out.reserve(static_cast<size_t>(2 * channel_window + 1) * (2 * layer_window + 1));
  for (int dl = -layer_window; dl <= layer_window; ++dl) {
    const int layer = p.layer + dl;
    if (layer < 0 || layer >= config_.n_layers) continue;
    for (int dc = -channel_window; dc <= channel_window; ++dc) {
      if (dl == 0 && dc == 0) continue;
      int channel = (p.channel + dc) % config_.n_channels;
      if (channel < 0) channel += config_.n_channels;
      out.push_back({layer, channel, p.slice});
    }
  }
  return out;
}

int SphericalScan::populated_count() const {
  int n = 0;
  for (const Measurement& m : cells_)
    if (m.valid) ++n;
  return n;
}

uint64_t SphericalScan::measurement_digest() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const Measurement& m : cells_) {
    mix(&m.range, sizeof(m.range));
    mix(&m.azimuth_deg, sizeof(m.azimuth_deg));
    mix(&m.elevation_deg, sizeof(m.elevation_deg));
    mix(&m.intensity, sizeof(m.intensity));
    mix(&m.t_offset, sizeof(m.t_offset));
    mix(&m.target_index, sizeof(m.target_index));
    mix(&m.valid, sizeof(m.valid));
  }
  return h;
}

void SphericalScan::clear_attributes() {
  std::fill(attrs_.begin(), attrs_.end(), AttributeSet{});
}

}  // namespace percept
