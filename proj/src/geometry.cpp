#include "percept/geometry.hpp"

#include <algorithm>

namespace percept {

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

static double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return false;
  int sign = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const double c = cross(poly[i], poly[(i + 1) % poly.size()], p);
    if (std::abs(c) < 1e-12) continue;
    const int s = c > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  // Ray crossing count; boundary points count as inside for our purposes.
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if (((a.y() > p.y()) != (b.y() > p.y())) &&
        (p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())) {
      inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& convex_clip) {
  std::vector<Vec2> out = subject;
  const size_t n = convex_clip.size();
  if (n < 3) return {};
  // Clip polygon must be CCW for the inside test below.
  double twice = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = convex_clip[i];
    const Vec2& b = convex_clip[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  std::vector<Vec2> clip = convex_clip;
  if (twice < 0.0) std::reverse(clip.begin(), clip.end());

  for (size_t e = 0; e < n && !out.empty(); ++e) {
    const Vec2& ca = clip[e];
    const Vec2& cb = clip[(e + 1) % n];
    std::vector<Vec2> in;
    in.swap(out);
    for (size_t i = 0; i < in.size(); ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % in.size()];
      const double dp = cross(ca, cb, p);
      const double dq = cross(ca, cb, q);
      const bool p_in = dp >= 0.0;
      const bool q_in = dq >= 0.0;
      if (p_in) out.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out;
}

double convex_overlap_area(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  return polygon_area(clip_polygon(a, b));
}

double box_overlap_area(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  return convex_overlap_area(std::vector<Vec2>(ca.begin(), ca.end()),
                             std::vector<Vec2>(cb.begin(), cb.end()));
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

MinAreaRect bounding_rect_with_yaw(const std::vector<Vec2>& points, double yaw_rad) {
  const Eigen::Matrix2d r = rotation2d(-yaw_rad);
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const Vec2& p : points) {
    const Vec2 q = r * p;
    min_x = std::min(min_x, q.x());
    max_x = std::max(max_x, q.x());
    min_y = std::min(min_y, q.y());
    max_y = std::max(max_y, q.y());
  }
  MinAreaRect rect;
  rect.yaw = yaw_rad;
  rect.length = max_x - min_x;
  rect.width = max_y - min_y;
  rect.center = rotation2d(yaw_rad) * Vec2(0.5 * (min_x + max_x), 0.5 * (min_y + max_y));
  return rect;
}

std::optional<MinAreaRect> min_area_rect(const std::vector<Vec2>& hull) {
  if (hull.empty()) return std::nullopt;
  if (hull.size() == 1) return MinAreaRect{hull[0], 0.0, 0.0, 0.0};
  std::optional<MinAreaRect> best;
  double best_area = 1e300;
  const size_t n = hull.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 edge = hull[(i + 1) % n] - hull[i];
    if (edge.squaredNorm() < 1e-18) continue;
    const double yaw = std::atan2(edge.y(), edge.x());
    MinAreaRect rect = bounding_rect_with_yaw(hull, yaw);
    const double area = rect.length * rect.width;
    if (area < best_area) {
      best_area = area;
      best = rect;
    }
  }
  return best;
}

double polyline_length(const std::vector<Vec2>& line) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) len += (line[i + 1] - line[i]).norm();
  return len;
}

PolylineProjection project_to_polyline(const std::vector<Vec2>& line, const Vec2& p) {
  PolylineProjection best;
  double best_dist = 1e300;
  double s_base = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i];
    const Vec2 b = line[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double u = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 q = a + u * ab;
    const double d = (p - q).norm();
    if (d < best_dist) {
      best_dist = d;
      const Vec2 dir = ab.normalized();
      const Vec2 off = p - q;
      best.arc_length = s_base + u * std::sqrt(len2);
      best.lateral = dir.x() * off.y() - dir.y() * off.x();
      best.segment = static_cast<int>(i);
    }
    s_base += std::sqrt(len2);
  }
  return best;
}

Vec2 polyline_point_at(const std::vector<Vec2>& line, double arc_length) {
  if (line.empty()) return {};
  if (line.size() == 1) return line[0];
  double s = arc_length;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const double seg = (line[i + 1] - line[i]).norm();
    if (s <= seg || i + 2 == line.size()) {
      const double u = seg > 0.0 ? std::clamp(s / seg, 0.0, 1.0) : 0.0;
      return line[i] + u * (line[i + 1] - line[i]);
    }
    s -= seg;
  }
  return line.back();
}

Vec2 polyline_direction_at(const std::vector<Vec2>& line, double arc_length) {
  if (line.size() < 2) return {1.0, 0.0};
  double s = arc_length;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const double seg = (line[i + 1] - line[i]).norm();
    if (s <= seg || i + 2 == line.size()) return (line[i + 1] - line[i]).normalized();
    s -= seg;
  }
  return (line.back() - line[line.size() - 2]).normalized();
}

}  // namespace percept
