#pragma once

#include "percept/filters.hpp"
#include "percept/hypothesis.hpp"

#include <cstdint>

namespace percept {

struct TrackerParams {
  FilterParams filter;
  double dim_blend{0.25};          // approach rate toward bounded dimension measurements
  double dim_sigma_m{0.3};         // dimension term weight in the association distance
  double ttl_s{0.5};
  int publish_min_updates{3};
  double publish_min_displacement_m{2.0};
  double vehicle_length_min_m{2.5};
  double vehicle_length_max_m{12.0};
  double vehicle_width_min_m{1.2};
  double vehicle_width_max_m{2.6};
  double vehicle_speed_max{20.0};
  double heading_speed_min{0.5};   // below this, headings are unreliable

  void validate() const;
};

/// 99% chi-square gate for the given degrees of freedom (2..5).
double chi2_gate_99(int dof);

struct TrackedObject {
  int id{0};
  bool imm_mode{false};
  CvFilter cv;
  ImmFilter imm;
  double length{0.0}, width{0.0}, height{0.0};
  QualityClass q_length{QualityClass::kDoubleOpen};
  QualityClass q_width{QualityClass::kDoubleOpen};
  QualityClass q_height{QualityClass::kDoubleOpen};
  RefPoint rp{RefPoint::kC};
  MotionClass motion{MotionClass::kPotentiallyMovable};
  int update_count{0};
  bool published{false};
  Vec2 first_detection_center{0.0, 0.0};
  double last_update_time{0.0};
  double max_speed_seen{0.0};
  double last_hyp_yaw{0.0};
  bool marked_for_deletion{false};

  Vec2 rp_position() const { return imm_mode ? imm.position() : cv.position(); }
  Vec2 velocity() const { return imm_mode ? imm.velocity() : cv.velocity(); }
  double speed() const { return velocity().norm(); }
  /// Box heading: filter yaw in IMM mode, velocity direction otherwise.
  double heading(double heading_speed_min) const;
  Vec2 center(double heading_speed_min) const;
};

/// Transform of a reference-point-anchored state to another label: rigid
/// offset rotated by the heading. Returns false when a needed dimension is
/// double-open (caller falls back to the center point).
bool transform_reference_point(Vec2& position, RefPoint from, RefPoint to, double yaw,
                               double length, double width, QualityClass q_length,
                               QualityClass q_width);

struct PublishedObject {
  int64_t scan_index{0};
  int id{0};
  Vec2 position;  // reference point, ego frame at publish time
  double yaw{0.0};
  Vec2 velocity;  // ego-frame axes
  double length{0.0}, width{0.0}, height{0.0};
  QualityClass q_length, q_width, q_height;
  RefPoint rp{RefPoint::kC};
  bool imm_mode{false};
};

class Tracker {
 public:
  explicit Tracker(const TrackerParams& params = {});

  /// One scan: predict per object to its hypothesis timestamp, associate by
  /// gated local nearest neighbor over the ambiguity interpretations, update,
  /// then run the lifecycle rules.
  void process(const std::vector<BoxHypothesis>& hypotheses, double t_start, double t_end);

  /// Snapshot of publishable objects, predicted to `t` and expressed in the
  /// ego frame at `t`.
  std::vector<PublishedObject> publish(int64_t scan_index, double t, const Pose2& ego) const;

  const std::vector<TrackedObject>& tracks() const { return tracks_; }
  const TrackerParams& params() const { return params_; }

 private:
  struct Candidate {
    size_t track;
    size_t hyp;
    int quarter_turns;
    double distance2;
    double gate;
  };

  void predict_track(TrackedObject& track, double dt) const;
  bool candidate_distance(const TrackedObject& track, const BoxHypothesis& hyp, double t_hyp,
                          Candidate& out) const;
  void update_track(TrackedObject& track, const BoxHypothesis& hyp, double t_hyp,
                    int quarter_turns);
  void spawn_track(const BoxHypothesis& hyp, double t_hyp);
  void maybe_switch_mode(TrackedObject& track);

  TrackerParams params_;
  std::vector<TrackedObject> tracks_;
  int next_id_{1};
};

}  // namespace percept
