#pragma once

#include "percept/ground.hpp"
#include "percept/scan.hpp"

#include <iosfwd>

namespace percept {

struct CompressionParams {
  double radial_step_m{0.5};
  double z_bin_m{0.25};
  double z_span_min_m{0.0};  // ground-relative
  double z_span_max_m{4.0};
  int density_window{2};     // w; neighborhood is (2w+1)^2 stacks
  int density_min_count{10};

  int bin_count() const {
    return static_cast<int>(std::round((z_span_max_m - z_span_min_m) / z_bin_m));
  }
  void validate() const;
};

/// Vertical volume condensed from a run of occupied height bins of one stack.
struct Volume {
  int channel{0};
  int radial_cell{0};
  double r_min{0.0};       // min horizontal radial distance of contributing points
  double phi_deg{0.0};     // stack center azimuth (sensor frame)
  double z_min{0.0};       // ground-relative
  double h{0.0};           // vertical extent
  int point_count{0};
  double t{0.0};           // earliest contributing time offset
  double ground_z{0.0};    // sensor-relative ground height under the stack
  int cluster{-1};
  MotionClass motion{MotionClass::kUnknown};
};

/// Reference from a surviving elevated point back to its volume.
struct PointVolumeRef {
  uint32_t scan_cell{0};
  int32_t volume{-1};
};

/// Polar grid of per-cell occupancy bit stacks. One instance can be reused
/// across scans; populate() resets only the cells it touched last time.
class StackGrid {
 public:
  StackGrid() = default;

  /// Projects all elevated measurements into the stacks. Points outside the
  /// ground-relative height span are counted and dropped.
  void populate(const SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& ground,
                const CompressionParams& params);

  /// Builds the summed-area table over current stack counts. Called by
  /// density_filter(); exposed so neighborhood sums can be queried directly.
  void build_density_table();

  /// Density filter: a stack survives with >= 2 own points or enough points
  /// in its polar neighborhood, computed via the summed-area table. All
  /// stacks are judged against the pre-filter counts.
  void density_filter();

  /// Maximal runs of occupied bins -> one volume each, in channel order.
  std::vector<Volume> condense() const;

  /// Per-point volume assignments for the given condense() output.
  std::vector<PointVolumeRef> point_refs(const std::vector<Volume>& volumes) const;

  int dropped_out_of_span() const { return dropped_; }
  int elevated_point_count() const { return elevated_points_; }
  int removed_stacks() const { return removed_stacks_; }

  /// Neighborhood point count by brute-force summation (test oracle).
  int brute_force_neighborhood(int channel, int radial_cell, int window) const;
  int neighborhood_count(int channel, int radial_cell, int window) const;

  int n_channels() const { return n_channels_; }
  int n_radial() const { return n_radial_; }
  int count_at(int channel, int radial_cell) const { return counts_[cell_index(channel, radial_cell)]; }
  uint64_t bits_at(int channel, int radial_cell) const { return bits_[cell_index(channel, radial_cell)]; }

 private:
  size_t cell_index(int channel, int radial_cell) const {
    return static_cast<size_t>(channel) * n_radial_ + radial_cell;
  }

  CompressionParams params_;
  int n_channels_{0};
  int n_radial_{0};
  int bins_{0};
  double mount_height_{0.0};
  std::vector<uint64_t> bits_;
  std::vector<uint16_t> counts_;
  std::vector<float> bin_rmin_;    // per cell*bin
  std::vector<float> bin_t_;
  std::vector<uint16_t> bin_pts_;
  std::vector<float> ground_z_;    // sensor-relative ground height per touched cell
  std::vector<uint32_t> touched_;
  std::vector<uint8_t> touched_flag_;
  std::vector<int32_t> sat_;       // (n_channels+1) x (n_radial+1) prefix sums
  struct PointEntry {
    uint32_t scan_cell;
    uint32_t grid_cell;
    uint8_t bin;
  };
  std::vector<PointEntry> points_;
  int dropped_{0};
  int elevated_points_{0};
  int removed_stacks_{0};
};

void dump_volumes_csv(std::ostream& os, const std::vector<Volume>& volumes);

}  // namespace percept
