#include "percept/hypothesis.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>

namespace percept {

namespace {

constexpr struct {
  RefPoint rp;
  int fx, fy;
  const char* name;
} kRefPoints[] = {
    {RefPoint::kFL, 1, -1, "FL"},  {RefPoint::kFC, 1, 0, "FC"},  {RefPoint::kFR, 1, 1, "FR"},
    {RefPoint::kCL, 0, -1, "CL"},  {RefPoint::kC, 0, 0, "C"},    {RefPoint::kCR, 0, 1, "CR"},
    {RefPoint::kRL, -1, -1, "RL"}, {RefPoint::kRC, -1, 0, "RC"}, {RefPoint::kRR, -1, 1, "RR"},
};

}  // namespace

const char* to_string(RefPoint rp) { return kRefPoints[static_cast<int>(rp)].name; }

RefPoint ref_point_from_string(const std::string& s) {
  for (const auto& e : kRefPoints)
    if (s == e.name) return e.rp;
  throw ValidationError("unknown reference point label: " + s);
}

void ref_point_factors(RefPoint rp, int& fx, int& fy) {
  fx = kRefPoints[static_cast<int>(rp)].fx;
  fy = kRefPoints[static_cast<int>(rp)].fy;
}

RefPoint ref_point_from_factors(int fx, int fy) {
  for (const auto& e : kRefPoints)
    if (e.fx == fx && e.fy == fy) return e.rp;
  throw ValidationError("invalid reference point factors");
}

RefPoint rotate_ref_point(RefPoint rp, int quarter_turns) {
  int fx, fy;
  ref_point_factors(rp, fx, fy);
  int k = quarter_turns % 4;
  if (k < 0) k += 4;
  for (int i = 0; i < k; ++i) {
    const int nfx = fy;
    const int nfy = -fx;
    fx = nfx;
    fy = nfy;
  }
  return ref_point_from_factors(fx, fy);
}

Vec2 ref_point_offset(RefPoint from, RefPoint to, double length, double width) {
  int fx0, fy0, fx1, fy1;
  ref_point_factors(from, fx0, fy0);
  ref_point_factors(to, fx1, fy1);
  return {0.5 * length * (fx1 - fx0), 0.5 * width * (fy1 - fy0)};
}

const char* to_string(QualityClass q) {
  switch (q) {
    case QualityClass::kBounded: return "bounded";
    case QualityClass::kSingleOpen: return "single_open";
    case QualityClass::kDoubleOpen: return "double_open";
  }
  return "double_open";
}

namespace {

QualityClass downgrade(QualityClass q) {
  return q == QualityClass::kBounded ? QualityClass::kSingleOpen : QualityClass::kDoubleOpen;
}

struct AngularSpan {
  int lo_channel;
  int hi_channel;
  size_t lo_member;
  size_t hi_member;
};

// Contiguous arc containing all member channels (the largest empty gap is
// the outside).
AngularSpan channel_span(const std::vector<int>& channels, int n_channels) {
  std::vector<std::pair<int, size_t>> sorted;
  sorted.reserve(channels.size());
  for (size_t i = 0; i < channels.size(); ++i) sorted.emplace_back(channels[i], i);
  std::sort(sorted.begin(), sorted.end());
  int best_gap = n_channels - (sorted.back().first - sorted.front().first);
  size_t gap_after = sorted.size() - 1;
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    const int gap = sorted[i + 1].first - sorted[i].first;
    if (gap > best_gap) {
      best_gap = gap;
      gap_after = i;
    }
  }
  AngularSpan span;
  if (gap_after == sorted.size() - 1) {
    span.lo_channel = sorted.front().first;
    span.hi_channel = sorted.back().first;
    span.lo_member = sorted.front().second;
    span.hi_member = sorted.back().second;
  } else {
    span.lo_channel = sorted[gap_after + 1].first;
    span.hi_channel = sorted[gap_after].first;
    span.lo_member = sorted[gap_after + 1].second;
    span.hi_member = sorted[gap_after].second;
  }
  return span;
}

}  // namespace

void occlusion_reasoning(BoxHypothesis& hyp, const HypothesisMembers& members,
                         const SphericalScan& scan, const ChannelGeometry& geom,
                         const HypothesisParams& params) {
  if (members.channels.empty()) return;
  const SensorConfig& cfg = scan.config();
  const AngularSpan span = channel_span(members.channels, cfg.n_channels);

  auto flank_occluded = [&](int flank_channel) {
    int c = flank_channel % cfg.n_channels;
    if (c < 0) c += cfg.n_channels;
    for (int layer = 0; layer < cfg.n_layers; ++layer) {
      const LogicalPosition p{layer, c, 0};
      const Measurement& m = scan.at(p);
      if (!m.valid) continue;
      if (scan.attributes(p).ground_class != GroundClass::kElevated) continue;
      if (scan.horizontal_distance(m) < members.r_nearest - params.occlusion_margin_m) return true;
    }
    return false;
  };

  const Eigen::Matrix2d inv = rotation2d(-hyp.yaw);
  const Vec2 box_center = hyp.center();
  auto dim_at_extreme = [&](size_t member) -> QualityClass* {
    const Vec2 local = inv * (members.points[member] - box_center);
    const double u = std::abs(local.x()) / std::max(0.5 * hyp.length, 0.05);
    const double v = std::abs(local.y()) / std::max(0.5 * hyp.width, 0.05);
    return u > v ? &hyp.q_length : &hyp.q_width;
  };

  if (flank_occluded(span.lo_channel - 1)) *dim_at_extreme(span.lo_member) = downgrade(
      *dim_at_extreme(span.lo_member));
  if (flank_occluded(span.hi_channel + 1)) *dim_at_extreme(span.hi_member) = downgrade(
      *dim_at_extreme(span.hi_member));
  (void)geom;
}

std::vector<BoxHypothesis> generate_hypotheses(const std::vector<Volume>& volumes,
                                               const ClusterLabeling& labeling,
                                               const std::vector<MotionClass>& cluster_classes,
                                               const ChannelGeometry& geom,
                                               const SphericalScan& scan,
                                               const HypothesisParams& params) {
  std::vector<BoxHypothesis> hypotheses;

  for (size_t ci = 0; ci < labeling.clusters.size(); ++ci) {
    if (cluster_classes[ci] == MotionClass::kStationary) continue;
    const Cluster& cl = labeling.clusters[ci];
    if (cl.members.empty()) continue;

    HypothesisMembers members;
    members.channels.reserve(cl.members.size());
    members.points.reserve(cl.members.size());
    members.r_nearest = 1e30;
    double z_lo = 1e30, z_hi = -1e30, t = 1e30;
    int point_count = 0;
    for (const int vi : cl.members) {
      const Volume& v = volumes[vi];
      const Pose2& ego = geom.poses[v.channel];
      const double az = ego.yaw + deg_to_rad(v.phi_deg);
      members.channels.push_back(v.channel);
      members.points.push_back(ego.position + v.r_min * Vec2(std::cos(az), std::sin(az)));
      members.r_nearest = std::min(members.r_nearest, v.r_min);
      z_lo = std::min(z_lo, v.z_min);
      z_hi = std::max(z_hi, v.z_min + v.h);
      t = std::min(t, v.t);
      point_count += v.point_count;
    }

    BoxHypothesis hyp;
    hyp.cluster_id = static_cast<int>(ci);
    hyp.motion = cluster_classes[ci];
    hyp.t = t;
    hyp.z_min = z_lo;
    hyp.height = z_hi - z_lo;
    hyp.q_height = z_hi >= params.height_span_top_m - params.height_bin_m
                       ? QualityClass::kSingleOpen
                       : QualityClass::kBounded;
    hyp.point_count = point_count;
    hyp.ambiguity = {0, 1, 2, 3};

    if (cl.members.size() < 2) {
      hyp.shape = ShapeClass::kPointLike;
      hyp.rp = RefPoint::kC;
      hyp.rp_position = members.points.front();
      hyp.yaw = 0.0;
      hyp.length = hyp.width = params.min_dim_m;
      hyp.q_length = hyp.q_width = QualityClass::kDoubleOpen;
      occlusion_reasoning(hyp, members, scan, geom, params);
      hypotheses.push_back(std::move(hyp));
      continue;
    }

    const std::vector<Vec2> hull = convex_hull(members.points);
    std::optional<MinAreaRect> rect = min_area_rect(hull);
    if (!rect || rect->length < 1e-6) {
      // collinear footprint: orient along the principal segment
      const Vec2 dir = (members.points.back() - members.points.front()).normalized();
      rect = bounding_rect_with_yaw(members.points, std::atan2(dir.y(), dir.x()));
    }

    // Support of the visible rect sides. Sides live in the rect frame:
    // front x=+L/2, rear x=-L/2, y=+-W/2.
    const Eigen::Matrix2d to_rect = rotation2d(-rect->yaw);
    const Pose2& sensor = geom.poses[members.channels.front()];
    const Vec2 sensor_local = to_rect * (sensor.position - rect->center);
    const double hl = 0.5 * std::max(rect->length, 1e-6);
    const double hw = 0.5 * std::max(rect->width, 1e-6);

    struct Side {
      bool visible{false};
      int support{0};
      double span_lo{1e30}, span_hi{-1e30};
      Vec2 dir;       // direction along the side in world frame
      int fx, fy;     // nonzero factor marks the side plane
    };
    std::array<Side, 4> sides;  // +x, -x, +y, -y
    sides[0] = {sensor_local.x() > hl, 0, 1e30, -1e30, {}, 1, 0};
    sides[1] = {sensor_local.x() < -hl, 0, 1e30, -1e30, {}, -1, 0};
    sides[2] = {sensor_local.y() > hw, 0, 1e30, -1e30, {}, 0, 1};
    sides[3] = {sensor_local.y() < -hw, 0, 1e30, -1e30, {}, 0, -1};
    const Eigen::Matrix2d from_rect = rotation2d(rect->yaw);
    sides[0].dir = from_rect * Vec2(0.0, 1.0);
    sides[1].dir = from_rect * Vec2(0.0, 1.0);
    sides[2].dir = from_rect * Vec2(1.0, 0.0);
    sides[3].dir = from_rect * Vec2(1.0, 0.0);

    for (const Vec2& p : members.points) {
      const Vec2 local = to_rect * (p - rect->center);
      auto feed = [&](Side& s, double dist_to_plane, double along) {
        if (!s.visible || dist_to_plane > params.edge_support_dist_m) return;
        ++s.support;
        s.span_lo = std::min(s.span_lo, along);
        s.span_hi = std::max(s.span_hi, along);
      };
      feed(sides[0], std::abs(local.x() - hl), local.y());
      feed(sides[1], std::abs(local.x() + hl), local.y());
      feed(sides[2], std::abs(local.y() - hw), local.x());
      feed(sides[3], std::abs(local.y() + hw), local.x());
    }

    std::vector<int> detected;
    for (int i = 0; i < 4; ++i) {
      const Side& s = sides[i];
      if (s.visible && s.support >= params.edge_support_min_points &&
          s.span_hi - s.span_lo >= params.min_edge_length_m)
        detected.push_back(i);
    }

    double yaw = rect->yaw;
    if (detected.size() == 1) {
      hyp.shape = ShapeClass::kI;
      const Side& s = sides[detected[0]];
      yaw = std::atan2(s.dir.y(), s.dir.x());
    } else if (detected.size() == 2 && sides[detected[0]].fx * sides[detected[1]].fx == 0 &&
               sides[detected[0]].fy * sides[detected[1]].fy == 0) {
      hyp.shape = ShapeClass::kL;
      // orient along the longer detected edge
      const Side& a = sides[detected[0]];
      const Side& b = sides[detected[1]];
      const Side& dominant = (a.span_hi - a.span_lo) >= (b.span_hi - b.span_lo) ? a : b;
      yaw = std::atan2(dominant.dir.y(), dominant.dir.x());
    } else {
      hyp.shape = ShapeClass::kTrapezoid;
    }

    const MinAreaRect box = bounding_rect_with_yaw(members.points, yaw);
    hyp.yaw = box.yaw;
    hyp.length = std::max(box.length, params.min_dim_m);
    hyp.width = std::max(box.width, params.min_dim_m);

    // Reference point and initial dimension quality per shape.
    const Eigen::Matrix2d to_box = rotation2d(-box.yaw);
    const Vec2 sensor_box = to_box * (sensor.position - box.center);
    if (hyp.shape == ShapeClass::kI) {
      // detected edge runs along the box x-axis; it sits on the sensor side
      const int fy = sensor_box.y() >= 0.0 ? 1 : -1;
      hyp.rp = ref_point_from_factors(0, fy);
      hyp.q_length = QualityClass::kBounded;
      hyp.q_width = QualityClass::kSingleOpen;
    } else if (hyp.shape == ShapeClass::kL) {
      const int fx = sensor_box.x() >= 0.0 ? 1 : -1;
      const int fy = sensor_box.y() >= 0.0 ? 1 : -1;
      hyp.rp = ref_point_from_factors(fx, fy);
      hyp.q_length = QualityClass::kSingleOpen;
      hyp.q_width = QualityClass::kSingleOpen;
    } else {
      hyp.rp = RefPoint::kC;
      hyp.q_length = QualityClass::kDoubleOpen;
      hyp.q_width = QualityClass::kDoubleOpen;
    }

    int fx, fy;
    ref_point_factors(hyp.rp, fx, fy);
    hyp.rp_position =
        box.center + rotation2d(box.yaw) * Vec2(0.5 * hyp.length * fx, 0.5 * hyp.width * fy);

    occlusion_reasoning(hyp, members, scan, geom, params);
    hypotheses.push_back(std::move(hyp));
  }
  return hypotheses;
}

}  // namespace percept
