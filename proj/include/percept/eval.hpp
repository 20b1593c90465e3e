#pragma once

#include "percept/hypothesis.hpp"
#include "percept/scene.hpp"
#include "percept/tracker.hpp"

#include <iosfwd>
#include <map>
#include <optional>

namespace percept {

enum class Scenario { kAcc, kLaneChange, kLeftTurn };
Scenario scenario_from_string(const std::string& s);
const char* to_string(Scenario s);

struct EvalParams {
  double horizon_m{80.0};          // relevance distance along the lane
  int lane_change_per_roi{2};      // LC_all: objects per region of interest
  bool lane_change_first_only{false};  // LC_1 variant
  double overlap_epsilon{1e-6};    // m^2 floor for "non-zero overlap"
  double warmup_s{1.0};
  // Intelligent-driver-model constants for ACC target selection
  double idm_time_headway{1.5};
  double idm_accel{1.5};
  double idm_decel{2.0};
  double idm_min_gap{2.0};
  double idm_desired_speed{13.9};
};

/// One relevance-filtered object: the box in the evaluation frame plus which
/// ROI it was assigned to.
struct RelevantObject {
  int id{0};
  OrientedBox box;
  Vec2 velocity;
  double height{0.0};
  QualityClass q_length{QualityClass::kBounded};
  QualityClass q_width{QualityClass::kBounded};
  RefPoint rp{RefPoint::kC};
  Vec2 rp_position;
  int roi{0};
  double arc_distance{0.0};  // signed along-lane distance to the ego
};

/// Scenario-specific relevance mapping for one frame.
struct AugmentedScene {
  Scenario scenario{Scenario::kAcc};
  std::vector<RelevantObject> objects;  // relevance-filtered, ordered per ROI
  std::optional<int> acc_target;        // id, ACC scenario only
};

/// Generic object view used to build augmented scenes from either side.
struct SceneObject {
  int id{0};
  Vec2 center;
  double yaw{0.0};
  double length{0.0}, width{0.0}, height{0.0};
  Vec2 velocity;
  QualityClass q_length{QualityClass::kBounded};
  QualityClass q_width{QualityClass::kBounded};
  RefPoint rp{RefPoint::kC};
  Vec2 rp_position;
};

SceneObject scene_object_from_truth(const TruthObject& o);
SceneObject scene_object_from_output(const PublishedObject& o, const Pose2& ego);

/// Corner-in-lane assignment: an object belongs to a lane iff at least one
/// box corner lies inside the lane polygon.
bool assigned_to_lane(const OrientedBox& box, const Lane& lane);

/// Builds the relevance mapping for a frame. Lanes and objects are given in
/// the locally fixed frame; the ego pose anchors the regions of interest.
AugmentedScene build_augmented_scene(Scenario scenario, const std::vector<SceneObject>& objects,
                                     const std::vector<Lane>& lanes, const Pose2& ego_pose,
                                     const Vec2& ego_velocity, const EvalParams& params);

/// Required IDM deceleration toward a leader; larger values mean the leader
/// constrains the ego more.
double idm_required_deceleration(double ego_speed, double lead_speed, double gap,
                                 const EvalParams& params);

struct MotFrame {
  int64_t scan_index{0};
  int matches{0};
  int false_positives{0};
  int false_negatives{0};
  int id_switches{0};
  int relevant_references{0};
  bool acc_target_match{true};
};

struct StateErrorSamples {
  std::vector<double> dx, dy, dyaw_deg, dlen, dwid;
};

struct MotReport {
  std::vector<MotFrame> frames;
  StateErrorSamples errors;
  int total_matches{0};
  int total_fp{0};
  int total_fn{0};
  int total_idsw{0};
  int total_rro{0};
  int acc_target_mismatches{0};
  std::optional<double> mota() const {
    if (total_rro == 0) return std::nullopt;
    return 1.0 - static_cast<double>(total_fp + total_fn + total_idsw) / total_rro;
  }
  double fp_rate() const { return total_rro ? 100.0 * total_fp / total_rro : 0.0; }
  double fn_rate() const { return total_rro ? 100.0 * total_fn / total_rro : 0.0; }
};

/// Frame matching: any-overlap admissibility, continuity preferred (a pair
/// that still overlaps keeps its identity), then greedy best-overlap.
/// Relevance mismatches surface as FP/FN.
class FrameMatcher {
 public:
  explicit FrameMatcher(const EvalParams& params) : params_(params) {}

  MotFrame match(int64_t scan_index, const AugmentedScene& truth, const AugmentedScene& output,
                 StateErrorSamples* errors = nullptr);

  void reset() { last_match_.clear(); }

 private:
  EvalParams params_;
  std::map<int, int> last_match_;  // truth id -> output id
};

struct LatencyReport {
  struct PerObject {
    int id{0};
    double first_truth_distance{0.0};
    double hypothesis_delay_s{-1.0};  // -1: never seen
    double publish_delay_s{-1.0};
  };
  std::vector<PerObject> objects;
  double mean_first_distance() const;
  double max_publish_delay() const;
  double max_hypothesis_delay() const;
};

struct EvalInput {
  GroundTruth truth;
  // per frame: published objects (ego frame) with the ego pose they refer to
  struct OutputFrame {
    int64_t scan_index{0};
    double t{0.0};
    Pose2 ego_pose;
    Vec2 ego_velocity;
    std::vector<PublishedObject> objects;
  };
  std::vector<OutputFrame> output;
  // optional: hypothesis boxes per scan in the locally fixed frame, for
  // latency evaluation
  std::map<int64_t, std::vector<OrientedBox>> hypotheses;
  double scan_period{0.1};
};

struct EvalResult {
  MotReport mot;
  LatencyReport latency;
  // LeftTurn: per-frame existence recall over the oncoming-lane ROIs
  double existence_recall{0.0};
};

EvalResult evaluate(Scenario scenario, const EvalInput& input, const EvalParams& params);

void write_report(std::ostream& os, Scenario scenario, const EvalResult& result);
void write_error_histograms_csv(std::ostream& os, const StateErrorSamples& samples);

}  // namespace percept
