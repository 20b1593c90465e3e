#pragma once

#include "percept/scan.hpp"

#include <iosfwd>
#include <optional>

namespace percept {

/// Per-channel ego poses at firing time plus a de-skewed world-position
/// cache for every populated cell, shared by all stages of one scan.
struct ChannelGeometry {
  std::vector<Pose2> poses;
  std::vector<Vec2> world;  // per cell index; valid where the cell is populated

  static ChannelGeometry build(const SphericalScan& scan) {
    ChannelGeometry g;
    const int n = scan.config().n_channels;
    g.poses.resize(n);
    for (int c = 0; c < n; ++c) g.poses[c] = scan.ego_pose_at(scan.timestamp_of(c));
    g.world.assign(scan.cell_count(), Vec2(0.0, 0.0));
    for (size_t i = 0; i < scan.cell_count(); ++i) {
      const Measurement& m = scan.at(i);
      if (!m.valid) continue;
      const Pose2& ego = g.poses[scan.position_at(i).channel];
      const double a = ego.yaw + deg_to_rad(m.azimuth_deg);
      g.world[i] = ego.position + scan.horizontal_distance(m) * Vec2(std::cos(a), std::sin(a));
    }
    return g;
  }

  Vec2 world_position(const SphericalScan& scan, const LogicalPosition& p,
                      const Measurement& m) const {
    if (!world.empty()) return world[scan.index_of(p)];
    const Pose2& ego = poses[p.channel];
    const double a = ego.yaw + deg_to_rad(m.azimuth_deg);
    return ego.position + scan.horizontal_distance(m) * Vec2(std::cos(a), std::sin(a));
  }
};

struct GroundParams {
  double cell_size_m{0.5};
  double slope_max_deg{15.0};
  double seed_tolerance_m{0.3};
  double dz_ground_m{0.15};
  int fill_iterations{10};
  double curb_height_min_m{0.05};
  double curb_height_max_m{0.30};
  double curb_joint_angle_min_deg{120.0};
  double curb_density_min_per_m{10.0};
  double split_merge_dist_m{0.05};

  void validate() const;
};

/// Ego-centered Cartesian height grid. Heights are sensor-relative z (ground
/// directly below the sensor sits near -mount_height).
class HeightGrid {
 public:
  HeightGrid() = default;
  HeightGrid(const Vec2& center, double half_extent_m, double cell_size_m);

  int size() const { return size_; }
  double cell_size() const { return cell_size_; }
  const Vec2& origin() const { return origin_; }

  std::optional<int> cell_index(const Vec2& world) const {
    const int ix = static_cast<int>(std::floor((world.x() - origin_.x()) / cell_size_));
    const int iy = static_cast<int>(std::floor((world.y() - origin_.y()) / cell_size_));
    if (ix < 0 || iy < 0 || ix >= size_ || iy >= size_) return std::nullopt;
    return iy * size_ + ix;
  }
  Vec2 cell_center(int index) const {
    const int ix = index % size_;
    const int iy = index / size_;
    return origin_ + cell_size_ * Vec2(ix + 0.5, iy + 0.5);
  }

  bool supported(int index) const { return support_[index] > 0; }
  bool filled(int index) const { return filled_[index] != 0; }
  bool resolved(int index) const { return supported(index) || filled(index); }
  double height(int index) const { return height_[index]; }
  int support_count(int index) const { return support_[index]; }

  /// Height at a world position when the covering cell is resolved.
  std::optional<double> height_at(const Vec2& world) const {
    const auto idx = cell_index(world);
    if (!idx || !resolved(*idx)) return std::nullopt;
    return height_[*idx];
  }

  void set_supported(int index, double height, int count) {
    height_[index] = height;
    support_[index] = static_cast<uint16_t>(std::min(count, 65535));
    filled_[index] = 0;
  }
  void set_filled(int index, double height) {
    height_[index] = height;
    filled_[index] = 1;
  }
  void set_height(int index, double height) { height_[index] = height; }

  void dump_csv(std::ostream& os) const;

 private:
  int size_{0};
  double cell_size_{0.5};
  Vec2 origin_{0.0, 0.0};
  std::vector<double> height_;
  std::vector<uint16_t> support_;
  std::vector<uint8_t> filled_;
};

/// Slope pre-classification: walking outward along each channel, a first
/// return anchors near the expected ground height at the mount and later
/// returns continue while the slope to the previous accepted candidate stays
/// under the limit. Sets the ground-candidate flag on slice-0 returns.
void preclassify_slope(SphericalScan& scan, const ChannelGeometry& geom, const GroundParams& params);

/// Median height grid over the candidates, then a 3x3 spatial median filter
/// over supported cells.
HeightGrid build_height_grid(const SphericalScan& scan, const ChannelGeometry& geom,
                             const GroundParams& params);

/// Iterative region fill: unresolved cells adjacent to >= 3 resolved cells
/// take their mean, until fixpoint or the iteration cap. Supported cells are
/// never altered.
void region_fill(HeightGrid& grid, const GroundParams& params);

/// Final classification by vertical distance to the grid: total over all
/// populated cells, all slices. Unresolved surface -> elevated plus the
/// unknown-surface flag.
void classify_ground(SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& grid,
                     const GroundParams& params);

/// Piecewise line fit per scan line over ground-adjacent points; joints with
/// a curb-scale height step, near-straight continuation and sufficient point
/// density get the curb flag.
void detect_curbs(SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& grid,
                  const GroundParams& params);

/// Runs the whole stage in order and returns the grid.
HeightGrid run_ground_stage(SphericalScan& scan, const ChannelGeometry& geom,
                            const GroundParams& params);

}  // namespace percept
