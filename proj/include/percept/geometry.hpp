#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

namespace percept {

using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle in degrees to [0, 360).
inline double wrap_deg_360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

/// Wraps an angle in degrees to (-180, 180].
inline double wrap_deg_180(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w <= 0.0) w += 360.0;
  return w - 180.0;
}

inline double wrap_rad_pi(double rad) {
  double w = std::fmod(rad + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

inline Eigen::Matrix2d rotation2d(double yaw_rad) {
  Eigen::Matrix2d r;
  const double c = std::cos(yaw_rad), s = std::sin(yaw_rad);
  r << c, -s, s, c;
  return r;
}

/// Planar pose in the locally fixed frame. Yaw in radians, CCW positive.
struct Pose2 {
  Vec2 position{0.0, 0.0};
  double yaw{0.0};

  Vec2 to_world(const Vec2& local) const { return position + rotation2d(yaw) * local; }
  Vec2 to_local(const Vec2& world) const { return rotation2d(-yaw) * (world - position); }
};

/// Linear interpolation between poses; yaw follows the shortest arc.
inline Pose2 interpolate(const Pose2& a, const Pose2& b, double u) {
  Pose2 p;
  p.position = (1.0 - u) * a.position + u * b.position;
  p.yaw = a.yaw + u * wrap_rad_pi(b.yaw - a.yaw);
  return p;
}

struct TimedPose {
  double t{0.0};
  Pose2 pose;
};

/// Time-indexed pose samples with linear interpolation; clamps outside the span.
class PoseTrack {
 public:
  void add(double t, const Pose2& pose) { samples_.push_back({t, pose}); }
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  const std::vector<TimedPose>& samples() const { return samples_; }

  Pose2 at(double t) const {
    if (samples_.empty()) return {};
    if (t <= samples_.front().t || samples_.size() == 1) return samples_.front().pose;
    if (t >= samples_.back().t) return samples_.back().pose;
    size_t hi = 1;
    while (samples_[hi].t < t) ++hi;
    const TimedPose& a = samples_[hi - 1];
    const TimedPose& b = samples_[hi];
    const double span = b.t - a.t;
    const double u = span > 0.0 ? (t - a.t) / span : 0.0;
    return interpolate(a.pose, b.pose, u);
  }

 private:
  std::vector<TimedPose> samples_;
};

/// Oriented rectangle in the plane: center, heading, full length (along
/// heading) and full width (across heading).
struct OrientedBox {
  Vec2 center{0.0, 0.0};
  double yaw{0.0};
  double length{0.0};
  double width{0.0};

  std::array<Vec2, 4> corners() const {
    const Eigen::Matrix2d r = rotation2d(yaw);
    const Vec2 dx = r * Vec2(0.5 * length, 0.0);
    const Vec2 dy = r * Vec2(0.0, 0.5 * width);
    return {center + dx + dy, center + dx - dy, center - dx - dy, center - dx + dy};
  }
};

double polygon_area(const std::vector<Vec2>& poly);
bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

/// Sutherland-Hodgman clip of a polygon against a convex clip polygon.
std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& convex_clip);

/// Intersection area of two convex polygons (e.g. box corners).
double convex_overlap_area(const std::vector<Vec2>& a, const std::vector<Vec2>& b);
double box_overlap_area(const OrientedBox& a, const OrientedBox& b);

/// Andrew monotone chain; returns CCW hull without the closing point.
/// Collinear points on the hull boundary are dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

struct MinAreaRect {
  Vec2 center;
  double yaw{0.0};     // direction of the rect edge chosen as "length"
  double length{0.0};  // extent along yaw
  double width{0.0};   // extent across yaw
};

/// Rotating calipers over hull edges; the rectangle of minimal area that
/// contains all points. Edge directions come from the hull.
std::optional<MinAreaRect> min_area_rect(const std::vector<Vec2>& hull);

/// Smallest rectangle with the given fixed heading that contains the points.
MinAreaRect bounding_rect_with_yaw(const std::vector<Vec2>& points, double yaw_rad);

/// Arc-length position of the projection of `p` onto the polyline, plus the
/// signed lateral offset (positive to the left of travel direction).
struct PolylineProjection {
  double arc_length{0.0};
  double lateral{0.0};
  int segment{0};
};
PolylineProjection project_to_polyline(const std::vector<Vec2>& line, const Vec2& p);
double polyline_length(const std::vector<Vec2>& line);
Vec2 polyline_point_at(const std::vector<Vec2>& line, double arc_length);
Vec2 polyline_direction_at(const std::vector<Vec2>& line, double arc_length);

}  // namespace percept
