#pragma once

#include "percept/clustering.hpp"
#include "percept/motion.hpp"

namespace percept {

/// The nine box reference points: corners, side midpoints, center. Body
/// frame: +x forward (length), left side at -y (matching the RL -> C offset
/// (+L/2, +W/2)).
enum class RefPoint : uint8_t { kFL, kFC, kFR, kCL, kC, kCR, kRL, kRC, kRR };

const char* to_string(RefPoint rp);
RefPoint ref_point_from_string(const std::string& s);

/// Body-frame offset factors (fx, fy): position = (fx * L/2, fy * W/2).
void ref_point_factors(RefPoint rp, int& fx, int& fy);
RefPoint ref_point_from_factors(int fx, int fy);

/// Relabeling under a yaw interpretation offset of k * 90 deg. Odd k swaps
/// length and width.
RefPoint rotate_ref_point(RefPoint rp, int quarter_turns);

/// Body-frame offset vector from one reference point to another.
Vec2 ref_point_offset(RefPoint from, RefPoint to, double length, double width);

enum class QualityClass : uint8_t { kBounded, kSingleOpen, kDoubleOpen };
const char* to_string(QualityClass q);

enum class ShapeClass : uint8_t { kI, kL, kTrapezoid, kPointLike };

struct HypothesisParams {
  double edge_support_dist_m{0.2};
  int edge_support_min_points{3};
  double min_edge_length_m{0.3};
  double min_dim_m{0.2};
  double occlusion_margin_m{0.5};
  double pos_sigma_m{0.15};
  double yaw_sigma_deg{5.0};
  double dim_sigma_m{0.3};
  double height_span_top_m{4.0};  // stack ceiling; extents reaching it stay open
  double height_bin_m{0.25};
};

struct BoxHypothesis {
  Vec2 rp_position;  // world frame, at the reference point
  double yaw{0.0};
  double length{0.0}, width{0.0};
  double z_min{0.0}, height{0.0};
  RefPoint rp{RefPoint::kC};
  ShapeClass shape{ShapeClass::kPointLike};
  QualityClass q_length{QualityClass::kDoubleOpen};
  QualityClass q_width{QualityClass::kDoubleOpen};
  QualityClass q_height{QualityClass::kBounded};
  double t{0.0};  // seconds since scan start of the earliest member volume
  MotionClass motion{MotionClass::kPotentiallyMovable};
  int cluster_id{-1};
  int point_count{0};
  std::vector<int> ambiguity;  // admissible quarter-turn interpretations

  Vec2 center() const {
    return rp_position + rotation2d(yaw) * ref_point_offset(rp, RefPoint::kC, length, width);
  }
  OrientedBox box() const { return {center(), yaw, length, width}; }
};

/// Oriented-box hypotheses from all non-stationary clusters: convex hull of
/// the member volume footprints, I / L / trapezoid shape from dominant-edge
/// support, box grown to contain every member, nearest visible corner or
/// side midpoint as the reference point.
std::vector<BoxHypothesis> generate_hypotheses(const std::vector<Volume>& volumes,
                                               const ClusterLabeling& labeling,
                                               const std::vector<MotionClass>& cluster_classes,
                                               const ChannelGeometry& geom,
                                               const SphericalScan& scan,
                                               const HypothesisParams& params);

struct HypothesisMembers {
  std::vector<int> channels;   // parallel arrays per member volume
  std::vector<Vec2> points;
  double r_nearest{0.0};
};

/// Flank-channel occlusion check: a nearer return just outside the object's
/// azimuth span opens the dimension that ends there.
void occlusion_reasoning(BoxHypothesis& hypothesis, const HypothesisMembers& members,
                         const SphericalScan& scan, const ChannelGeometry& geom,
                         const HypothesisParams& params);

}  // namespace percept
