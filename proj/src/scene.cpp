#include "percept/scene.hpp"

#include "percept/errors.hpp"

#include <cmath>
#include <set>

namespace percept {

Pose2 Trajectory::pose_at(double t) const {
  Pose2 p = start_;
  if (t <= 0.0) return p;
  double remaining = t;
  for (const MotionSegment& seg : segments_) {
    const double dt = std::min(remaining, seg.duration);
    if (std::abs(seg.yaw_rate) < 1e-9) {
      p.position += dt * seg.speed * Vec2(std::cos(p.yaw), std::sin(p.yaw));
    } else {
      const double r = seg.speed / seg.yaw_rate;
      const double yaw1 = p.yaw + seg.yaw_rate * dt;
      p.position += r * Vec2(std::sin(yaw1) - std::sin(p.yaw), std::cos(p.yaw) - std::cos(yaw1));
      p.yaw = yaw1;
    }
    remaining -= dt;
    if (remaining <= 0.0) return p;
  }
  return p;  // holds the final pose after the last segment
}

Vec2 Trajectory::velocity_at(double t) const {
  const double speed = speed_at(t);
  const Pose2 p = pose_at(t);
  return speed * Vec2(std::cos(p.yaw), std::sin(p.yaw));
}

double Trajectory::speed_at(double t) const {
  if (t < 0.0) return segments_.empty() ? 0.0 : segments_.front().speed;
  double elapsed = 0.0;
  for (const MotionSegment& seg : segments_) {
    elapsed += seg.duration;
    if (t < elapsed) return seg.speed;
  }
  return 0.0;
}

void Scene::validate() const {
  const double max_slope = std::tan(deg_to_rad(30.0));
  for (const GroundPatch& p : ground)
    if (std::abs(p.slope_x) > max_slope || std::abs(p.slope_y) > max_slope)
      throw ValidationError("scene: ground slope exceeds 30 degrees");
  std::set<int> ids;
  for (const Actor& a : actors)
    if (!ids.insert(a.id).second) throw ValidationError("scene: duplicate actor id");
  for (const Lane& l : lanes)
    if (l.width <= 0.0) throw ValidationError("scene: lane width must be positive");
}

}  // namespace percept
