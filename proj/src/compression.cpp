#include "percept/compression.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace percept {

void CompressionParams::validate() const {
  if (radial_step_m <= 0.0 || z_bin_m <= 0.0)
    throw ValidationError("compression: steps must be positive");
  if (z_span_max_m <= z_span_min_m) throw ValidationError("compression: empty height span");
  if (bin_count() < 1 || bin_count() > 64)
    throw ValidationError("compression: bin count must be in [1, 64]");
  if (density_window < 0 || density_min_count < 0)
    throw ValidationError("compression: density settings must be non-negative");
}

void StackGrid::populate(const SphericalScan& scan, const ChannelGeometry& geom,
                         const HeightGrid& ground, const CompressionParams& params) {
  params.validate();
  params_ = params;
  const SensorConfig& cfg = scan.config();
  mount_height_ = cfg.mount_height_m;
  bins_ = params.bin_count();
  const int n_radial = static_cast<int>(std::ceil(cfg.max_range_m / params.radial_step_m));

  if (n_channels_ != cfg.n_channels || n_radial_ != n_radial) {
    n_channels_ = cfg.n_channels;
    n_radial_ = n_radial;
    const size_t cells = static_cast<size_t>(n_channels_) * n_radial_;
    bits_.assign(cells, 0);
    counts_.assign(cells, 0);
    bin_rmin_.assign(cells * bins_, 0.0f);
    bin_t_.assign(cells * bins_, 0.0f);
    bin_pts_.assign(cells * bins_, 0);
    ground_z_.assign(cells, 0.0f);
    touched_flag_.assign(cells, 0);
    sat_.assign(static_cast<size_t>(n_channels_ + 1) * (n_radial_ + 1), 0);
  } else {
    for (const uint32_t cell : touched_) {
      bits_[cell] = 0;
      counts_[cell] = 0;
      std::fill_n(bin_rmin_.begin() + static_cast<size_t>(cell) * bins_, bins_, 0.0f);
      std::fill_n(bin_t_.begin() + static_cast<size_t>(cell) * bins_, bins_, 0.0f);
      std::fill_n(bin_pts_.begin() + static_cast<size_t>(cell) * bins_, bins_, 0);
      touched_flag_[cell] = 0;
    }
  }
  touched_.clear();
  points_.clear();
  dropped_ = 0;
  elevated_points_ = 0;
  removed_stacks_ = 0;

  for (size_t i = 0; i < scan.cell_count(); ++i) {
    const Measurement& m = scan.at(i);
    if (!m.valid) continue;
    if (scan.attributes(i).ground_class != GroundClass::kElevated) continue;
    ++elevated_points_;

    const LogicalPosition p = scan.position_at(i);
    const double d = scan.horizontal_distance(m);
    const int rcell = static_cast<int>(d / params.radial_step_m);
    if (rcell < 0 || rcell >= n_radial_) {
      ++dropped_;
      continue;
    }
    const size_t cell = cell_index(p.channel, rcell);

    if (!touched_flag_[cell]) {
      touched_flag_[cell] = 1;
      touched_.push_back(static_cast<uint32_t>(cell));
      // Ground height at the stack center; sensor-height datum when the
      // surface is unresolved there.
      const Pose2& ego = geom.poses[p.channel];
      const double a = ego.yaw + deg_to_rad((p.channel + 0.5) * cfg.azimuth_step_deg);
      const Vec2 center =
          ego.position + (rcell + 0.5) * params.radial_step_m * Vec2(std::cos(a), std::sin(a));
      const auto h = ground.height_at(center);
      ground_z_[cell] = static_cast<float>(h ? *h : -mount_height_);
    }

    const double z_rel = scan.sensor_relative_z(m) - ground_z_[cell];
    const int bin = static_cast<int>(std::floor((z_rel - params.z_span_min_m) / params.z_bin_m));
    if (bin < 0 || bin >= bins_) {
      ++dropped_;
      continue;
    }

    const size_t slot = cell * bins_ + bin;
    const uint64_t mask = 1ull << bin;
    if ((bits_[cell] & mask) == 0) {
      bits_[cell] |= mask;
      bin_rmin_[slot] = static_cast<float>(d);
      bin_t_[slot] = static_cast<float>(m.t_offset);
    } else {
      bin_rmin_[slot] = std::min(bin_rmin_[slot], static_cast<float>(d));
      bin_t_[slot] = std::min(bin_t_[slot], static_cast<float>(m.t_offset));
    }
    ++bin_pts_[slot];
    if (counts_[cell] < 65535) ++counts_[cell];
    points_.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(cell),
                       static_cast<uint8_t>(bin)});
  }
}

void StackGrid::build_density_table() {
  // sat[(c+1)*(R+1) + r+1] = sum of counts over channels <= c, radial <= r
  const int R = n_radial_;
  for (int c = 0; c < n_channels_; ++c) {
    const size_t row = static_cast<size_t>(c + 1) * (R + 1);
    const size_t prev = static_cast<size_t>(c) * (R + 1);
    int32_t run = 0;
    for (int r = 0; r < R; ++r) {
      run += counts_[cell_index(c, r)];
      sat_[row + r + 1] = sat_[prev + r + 1] + run;
    }
  }
}

int StackGrid::neighborhood_count(int channel, int radial_cell, int window) const {
  // Channel interval wraps; radial interval clips. Split the wrapped interval
  // into at most two plain ranges against the prefix table.
  const int R = n_radial_;
  const int r0 = std::max(0, radial_cell - window);
  const int r1 = std::min(R - 1, radial_cell + window);
  auto range_sum = [&](int c0, int c1) -> int {
    // inclusive channel range, no wrap
    const size_t hi = static_cast<size_t>(c1 + 1) * (R + 1);
    const size_t lo = static_cast<size_t>(c0) * (R + 1);
    return sat_[hi + r1 + 1] - sat_[hi + r0] - (sat_[lo + r1 + 1] - sat_[lo + r0]);
  };
  int c0 = channel - window;
  int c1 = channel + window;
  if (c1 - c0 + 1 >= n_channels_) return range_sum(0, n_channels_ - 1);
  int total = 0;
  if (c0 < 0) {
    total += range_sum(c0 + n_channels_, n_channels_ - 1);
    c0 = 0;
  }
  if (c1 >= n_channels_) {
    total += range_sum(0, c1 - n_channels_);
    c1 = n_channels_ - 1;
  }
  total += range_sum(c0, c1);
  return total;
}

int StackGrid::brute_force_neighborhood(int channel, int radial_cell, int window) const {
  int total = 0;
  for (int dc = -window; dc <= window; ++dc) {
    int c = (channel + dc) % n_channels_;
    if (c < 0) c += n_channels_;
    for (int r = radial_cell - window; r <= radial_cell + window; ++r) {
      if (r < 0 || r >= n_radial_) continue;
      total += counts_[cell_index(c, r)];
    }
  }
  return total;
}

void StackGrid::density_filter() {
  build_density_table();
  for (const uint32_t cell : touched_) {
    if (counts_[cell] >= 2) continue;
    const int channel = static_cast<int>(cell) / n_radial_;
    const int rcell = static_cast<int>(cell) % n_radial_;
    if (neighborhood_count(channel, rcell, params_.density_window) >= params_.density_min_count)
      continue;
    bits_[cell] = 0;
    counts_[cell] = 0;
    ++removed_stacks_;
  }
}

std::vector<Volume> StackGrid::condense() const {
  std::vector<uint32_t> cells(touched_.begin(), touched_.end());
  std::sort(cells.begin(), cells.end());

  std::vector<Volume> volumes;
  volumes.reserve(cells.size());
  const double az_step = 360.0 / n_channels_;
  for (const uint32_t cell : cells) {
    uint64_t bits = bits_[cell];
    if (!bits) continue;
    const int channel = static_cast<int>(cell) / n_radial_;
    const int rcell = static_cast<int>(cell) % n_radial_;
    while (bits) {
      const int start = std::countr_zero(bits);
      int end = start;
      while (end < bins_ && (bits & (1ull << end))) ++end;
      // clear the run
      for (int b = start; b < end; ++b) bits &= ~(1ull << b);

      Volume v;
      v.channel = channel;
      v.radial_cell = rcell;
      v.phi_deg = (channel + 0.5) * az_step;
      v.z_min = params_.z_span_min_m + start * params_.z_bin_m;
      v.h = (end - start) * params_.z_bin_m;
      v.ground_z = ground_z_[cell];
      double rmin = 1e30, t = 1e30;
      int pts = 0;
      for (int b = start; b < end; ++b) {
        const size_t slot = static_cast<size_t>(cell) * bins_ + b;
        rmin = std::min(rmin, static_cast<double>(bin_rmin_[slot]));
        t = std::min(t, static_cast<double>(bin_t_[slot]));
        pts += bin_pts_[slot];
      }
      v.r_min = rmin;
      v.t = t;
      v.point_count = pts;
      volumes.push_back(v);
    }
  }
  return volumes;
}

std::vector<PointVolumeRef> StackGrid::point_refs(const std::vector<Volume>& volumes) const {
  // cell -> contiguous volume range (condense() emits cells in sorted order)
  std::vector<PointVolumeRef> refs;
  refs.reserve(points_.size());
  std::vector<int32_t> first(static_cast<size_t>(n_channels_) * n_radial_ + 1, -1);
  for (size_t vi = 0; vi < volumes.size(); ++vi) {
    const size_t cell = cell_index(volumes[vi].channel, volumes[vi].radial_cell);
    if (first[cell] < 0) first[cell] = static_cast<int32_t>(vi);
  }
  for (const PointEntry& e : points_) {
    PointVolumeRef ref;
    ref.scan_cell = e.scan_cell;
    ref.volume = -1;
    int32_t vi = first[e.grid_cell];
    if (vi >= 0) {
      const double z = params_.z_span_min_m + (e.bin + 0.5) * params_.z_bin_m;
      while (vi < static_cast<int32_t>(volumes.size())) {
        const Volume& v = volumes[vi];
        if (cell_index(v.channel, v.radial_cell) != e.grid_cell) break;
        if (z >= v.z_min && z <= v.z_min + v.h) {
          ref.volume = vi;
          break;
        }
        ++vi;
      }
    }
    refs.push_back(ref);
  }
  return refs;
}

void dump_volumes_csv(std::ostream& os, const std::vector<Volume>& volumes) {
  os << "channel,r_min,z_min,h,count\n";
  for (const Volume& v : volumes)
    os << v.channel << ',' << v.r_min << ',' << v.z_min << ',' << v.h << ',' << v.point_count
       << "\n";
}

}  // namespace percept
