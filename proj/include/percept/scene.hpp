#pragma once

#include "percept/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace percept {

/// Planar ground patch z = z0 + sx*(x-x0) + sy*(y-y0) over an axis-aligned
/// region. Patches later in the list win where regions overlap.
struct GroundPatch {
  double x_min{-1e9}, x_max{1e9}, y_min{-1e9}, y_max{1e9};
  double x0{0.0}, y0{0.0}, z0{0.0};
  double slope_x{0.0}, slope_y{0.0};

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  double height(double x, double y) const {
    return z0 + slope_x * (x - x0) + slope_y * (y - y0);
  }
};

/// Static oriented box; z_offset > 0 lifts it off the ground (overhangs).
struct StaticBox {
  OrientedBox footprint;
  double z_offset{0.0};  // bottom height above local ground
  double height{1.0};
  double intensity{0.5};
};

/// Piecewise-constant motion profile segment: either straight (constant
/// velocity) or a constant-turn arc.
struct MotionSegment {
  double duration{0.0};
  double speed{0.0};
  double yaw_rate{0.0};  // rad/s; 0 = straight
};

/// Scripted trajectory: start pose plus motion segments.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const Pose2& start, std::vector<MotionSegment> segments)
      : start_(start), segments_(std::move(segments)) {}

  Pose2 pose_at(double t) const;
  Vec2 velocity_at(double t) const;
  double speed_at(double t) const;

 private:
  Pose2 start_;
  std::vector<MotionSegment> segments_;
};

struct Actor {
  int id{0};
  double length{4.5}, width{1.8}, height{1.5};
  double intensity{0.5};
  Trajectory trajectory;
  double spawn_time{0.0};
  double despawn_time{1e18};

  bool alive_at(double t) const { return t >= spawn_time && t < despawn_time; }
};

struct Lane {
  int id{0};
  double width{3.5};
  std::vector<Vec2> centerline;
};

struct Scene {
  std::vector<GroundPatch> ground;
  std::vector<StaticBox> static_boxes;
  std::vector<Actor> actors;
  std::vector<Lane> lanes;
  Trajectory ego_trajectory;
  double ground_intensity{0.3};
  double marking_intensity{0.9};
  double marking_half_width{0.08};

  double ground_height(double x, double y) const {
    double z = 0.0;
    for (const GroundPatch& p : ground)
      if (p.contains(x, y)) z = p.height(x, y);
    return z;
  }
  void validate() const;
};

struct TruthObject {
  int id{0};
  Vec2 position;  // box center, locally fixed frame
  double yaw{0.0};
  double length{0.0}, width{0.0}, height{0.0};
  Vec2 velocity;

  OrientedBox box() const { return {position, yaw, length, width}; }
};

struct GroundTruthFrame {
  int64_t scan_index{0};
  double t{0.0};  // snapshot time (scan end)
  Pose2 ego_pose;
  Vec2 ego_velocity;
  std::vector<TruthObject> objects;
};

/// Truth for a whole recording: per-scan frames plus static lane geometry.
struct GroundTruth {
  std::vector<GroundTruthFrame> frames;
  std::vector<Lane> lanes;
};

}  // namespace percept
