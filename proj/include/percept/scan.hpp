#pragma once

#include "percept/geometry.hpp"
#include "percept/sensor.hpp"

#include <cstdint>
#include <optional>

namespace percept {

enum class GroundClass : uint8_t { kUnknown = 0, kGround = 1, kElevated = 2 };
enum class MotionClass : uint8_t {
  kUnknown = 0,
  kStationary = 1,
  kMovable = 2,
  kPotentiallyMovable = 3,
};

/// Per-position mutable state. Measured values never change after ingest;
/// every stage writes only here.
struct AttributeSet {
  // flag bits
  static constexpr uint8_t kGroundCandidate = 1 << 0;
  static constexpr uint8_t kCurb = 1 << 1;
  static constexpr uint8_t kElevatedFlag = 1 << 2;
  static constexpr uint8_t kRemoved = 1 << 3;
  static constexpr uint8_t kVisited = 1 << 4;
  static constexpr uint8_t kUnknownSurface = 1 << 5;

  uint8_t flags{0};
  GroundClass ground_class{GroundClass::kUnknown};
  MotionClass motion_class{MotionClass::kUnknown};
  int32_t cluster_label{-1};  // -1 = unlabeled

  bool has(uint8_t flag) const { return (flags & flag) != 0; }
  void set(uint8_t flag, bool on = true) {
    if (on) flags |= flag;
    else flags &= static_cast<uint8_t>(~flag);
  }
};

/// One sensor return. Measured fields are immutable after insertion.
struct Measurement {
  double range{0.0};          // meters
  double azimuth_deg{0.0};    // sensor frame, [0, 360)
  double elevation_deg{0.0};  // sensor frame
  double intensity{0.0};      // [0, 1]
  double t_offset{0.0};       // seconds since scan start
  uint8_t target_index{0};
  bool valid{false};
};

struct LogicalPosition {
  int layer{0};
  int channel{0};
  int slice{0};
  bool operator==(const LogicalPosition&) const = default;
};

/// One full sensor turn stored as a discrete-angle spherical grid. Every
/// (layer, channel, slice) triple is a valid logical position whether or not
/// a return was captured there.
class SphericalScan {
 public:
  SphericalScan() = default;
  explicit SphericalScan(const SensorConfig& config, int64_t scan_index = 0, double t_start = 0.0);

  const SensorConfig& config() const { return config_; }
  int64_t scan_index() const { return scan_index_; }
  double t_start() const { return t_start_; }
  void set_scan_index(int64_t idx) { scan_index_ = idx; }
  void set_t_start(double t) { t_start_ = t; }

  PoseTrack& ego_track() { return ego_track_; }
  const PoseTrack& ego_track() const { return ego_track_; }
  /// Ego pose at an offset since scan start.
  Pose2 ego_pose_at(double t_offset) const { return ego_track_.at(t_start_ + t_offset); }

  size_t cell_count() const { return cells_.size(); }
  size_t index_of(const LogicalPosition& p) const {
    return (static_cast<size_t>(p.layer) * config_.n_channels + p.channel) * config_.n_slices + p.slice;
  }
  LogicalPosition position_at(size_t index) const {
    const int slice = static_cast<int>(index % config_.n_slices);
    const size_t lc = index / config_.n_slices;
    return {static_cast<int>(lc / config_.n_channels), static_cast<int>(lc % config_.n_channels), slice};
  }

  const Measurement& at(const LogicalPosition& p) const { return cells_[index_of(p)]; }
  const Measurement& at(size_t index) const { return cells_[index]; }
  AttributeSet& attributes(const LogicalPosition& p) { return attrs_[index_of(p)]; }
  AttributeSet& attributes(size_t index) { return attrs_[index]; }
  const AttributeSet& attributes(size_t index) const { return attrs_[index]; }
  const AttributeSet& attributes(const LogicalPosition& p) const { return attrs_[index_of(p)]; }

  /// Inserts a measured return. The logical position is derived from the
  /// stored angles; returns false if the cell was already populated.
  bool insert(const LogicalPosition& p, const Measurement& m);

  /// Maps measured angles onto the discrete grid. Elevations farther than
  /// half the local layer spacing from every table entry are out of the
  /// field of view.
  std::optional<LogicalPosition> position_of(double azimuth_deg, double elevation_deg,
                                             int target_index) const;

  /// Logical positions within the angular window around `p`, same slice,
  /// excluding `p` itself. Channels wrap around.
  std::vector<LogicalPosition> neighbors(const LogicalPosition& p, int channel_window,
                                         int layer_window) const;

  double timestamp_of(int channel) const { return config_.timestamp_of(channel); }

  int populated_count() const;

  /// Horizontal distance and sensor-relative height of a return.
  double horizontal_distance(const Measurement& m) const {
    return m.range * std::cos(deg_to_rad(m.elevation_deg));
  }
  double sensor_relative_z(const Measurement& m) const {
    return m.range * std::sin(deg_to_rad(m.elevation_deg));
  }
  /// World-frame position of a return via the ego pose at its own timestamp.
  Vec2 world_position(const Measurement& m) const {
    const Pose2 ego = ego_pose_at(m.t_offset);
    const double a = ego.yaw + deg_to_rad(m.azimuth_deg);
    const double d = horizontal_distance(m);
    return ego.position + d * Vec2(std::cos(a), std::sin(a));
  }

  /// FNV-1a digest over all measured fields, in storage order. Attribute
  /// state does not contribute; used to assert measured-state purity.
  uint64_t measurement_digest() const;

  void clear_attributes();

 private:
  SensorConfig config_;
  std::vector<Measurement> cells_;
  std::vector<AttributeSet> attrs_;
  int64_t scan_index_{0};
  double t_start_{0.0};
  PoseTrack ego_track_;
};

}  // namespace percept
