#include "percept/eval.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace percept {

Scenario scenario_from_string(const std::string& s) {
  if (s == "acc") return Scenario::kAcc;
  if (s == "lane_change") return Scenario::kLaneChange;
  if (s == "left_turn") return Scenario::kLeftTurn;
  throw ConfigError("unknown scenario: " + s + " (acc, lane_change, left_turn)");
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::kAcc: return "acc";
    case Scenario::kLaneChange: return "lane_change";
    case Scenario::kLeftTurn: return "left_turn";
  }
  return "acc";
}

SceneObject scene_object_from_truth(const TruthObject& o) {
  SceneObject s;
  s.id = o.id;
  s.center = o.position;
  s.yaw = o.yaw;
  s.length = o.length;
  s.width = o.width;
  s.height = o.height;
  s.velocity = o.velocity;
  s.rp = RefPoint::kC;
  s.rp_position = o.position;
  return s;
}

SceneObject scene_object_from_output(const PublishedObject& o, const Pose2& ego) {
  SceneObject s;
  s.id = o.id;
  s.rp = o.rp;
  s.q_length = o.q_length;
  s.q_width = o.q_width;
  s.length = o.length;
  s.width = o.width;
  s.height = o.height;
  s.yaw = wrap_rad_pi(o.yaw + ego.yaw);
  s.rp_position = ego.to_world(o.position);
  s.center = s.rp_position +
             rotation2d(s.yaw) * ref_point_offset(o.rp, RefPoint::kC, o.length, o.width);
  s.velocity = rotation2d(ego.yaw) * o.velocity;
  return s;
}

bool assigned_to_lane(const OrientedBox& box, const Lane& lane) {
  if (lane.centerline.size() < 2) return false;
  const double total = polyline_length(lane.centerline);
  for (const Vec2& corner : box.corners()) {
    const PolylineProjection proj = project_to_polyline(lane.centerline, corner);
    if (std::abs(proj.lateral) <= 0.5 * lane.width && proj.arc_length > 1e-9 &&
        proj.arc_length < total - 1e-9)
      return true;
  }
  return false;
}

double idm_required_deceleration(double ego_speed, double lead_speed, double gap,
                                 const EvalParams& params) {
  const double s = std::max(gap, 0.1);
  const double dv = ego_speed - lead_speed;
  const double s_star = params.idm_min_gap + ego_speed * params.idm_time_headway +
                        ego_speed * dv / (2.0 * std::sqrt(params.idm_accel * params.idm_decel));
  const double accel = params.idm_accel * (1.0 - std::pow(ego_speed / params.idm_desired_speed, 4) -
                                           (s_star / s) * (s_star / s));
  return -accel;  // positive = braking demand
}

namespace {

struct LaneRef {
  int index;
  double offset;      // lateral position of the lane center relative to the ego
  double ego_arc;     // ego's arc-length station on this lane
};

std::vector<LaneRef> lane_frame(const std::vector<Lane>& lanes, const Pose2& ego_pose) {
  std::vector<LaneRef> refs;
  for (size_t i = 0; i < lanes.size(); ++i) {
    if (lanes[i].centerline.size() < 2) continue;
    const PolylineProjection proj = project_to_polyline(lanes[i].centerline, ego_pose.position);
    refs.push_back({static_cast<int>(i), -proj.lateral, proj.arc_length});
  }
  return refs;
}

}  // namespace

AugmentedScene build_augmented_scene(Scenario scenario, const std::vector<SceneObject>& objects,
                                     const std::vector<Lane>& lanes, const Pose2& ego_pose,
                                     const Vec2& ego_velocity, const EvalParams& params) {
  AugmentedScene scene;
  scene.scenario = scenario;
  const std::vector<LaneRef> refs = lane_frame(lanes, ego_pose);
  if (refs.empty()) return scene;

  // ego lane: the one whose center is nearest laterally
  const LaneRef* ego_lane = &refs[0];
  for (const LaneRef& r : refs)
    if (std::abs(r.offset) < std::abs(ego_lane->offset)) ego_lane = &r;

  auto arc_distance = [&](const LaneRef& ref, const SceneObject& o) {
    const PolylineProjection proj = project_to_polyline(lanes[ref.index].centerline, o.center);
    return proj.arc_length - ref.ego_arc;
  };

  auto collect = [&](const LaneRef& ref, bool front, int roi, int keep) {
    std::vector<RelevantObject> picked;
    for (const SceneObject& o : objects) {
      const OrientedBox box{o.center, o.yaw, o.length, o.width};
      if (!assigned_to_lane(box, lanes[ref.index])) continue;
      const double arc = arc_distance(ref, o);
      if (front && (arc <= 0.0 || arc > params.horizon_m)) continue;
      if (!front && (arc >= 0.0 || arc < -params.horizon_m)) continue;
      RelevantObject rel;
      rel.id = o.id;
      rel.box = box;
      rel.velocity = o.velocity;
      rel.height = o.height;
      rel.q_length = o.q_length;
      rel.q_width = o.q_width;
      rel.rp = o.rp;
      rel.rp_position = o.rp_position;
      rel.roi = roi;
      rel.arc_distance = arc;
      picked.push_back(rel);
    }
    std::sort(picked.begin(), picked.end(), [](const RelevantObject& a, const RelevantObject& b) {
      return std::abs(a.arc_distance) < std::abs(b.arc_distance);
    });
    if (static_cast<int>(picked.size()) > keep) picked.resize(keep);
    scene.objects.insert(scene.objects.end(), picked.begin(), picked.end());
  };

  if (scenario == Scenario::kAcc) {
    collect(*ego_lane, true, 0, 1000);
    // the preceding object demanding the largest deceleration
    const double ego_speed = ego_velocity.norm();
    double best = -1e30;
    for (const RelevantObject& rel : scene.objects) {
      const double lead_speed = rel.velocity.norm();
      const double gap = rel.arc_distance - 0.5 * rel.box.length;
      const double demand = idm_required_deceleration(ego_speed, lead_speed, gap, params);
      if (demand > best) {
        best = demand;
        scene.acc_target = rel.id;
      }
    }
  } else if (scenario == Scenario::kLaneChange) {
    const LaneRef* left = nullptr;
    const LaneRef* right = nullptr;
    for (const LaneRef& r : refs) {
      if (r.offset > ego_lane->offset + 0.5) {
        if (!left || r.offset < left->offset) left = &r;
      }
      if (r.offset < ego_lane->offset - 0.5) {
        if (!right || r.offset > right->offset) right = &r;
      }
    }
    const int keep = params.lane_change_first_only ? 1 : params.lane_change_per_roi;
    collect(*ego_lane, true, 0, keep);
    collect(*ego_lane, false, 1, keep);
    if (left) {
      collect(*left, true, 2, keep);
      collect(*left, false, 3, keep);
    }
    if (right) {
      collect(*right, true, 4, keep);
      collect(*right, false, 5, keep);
    }
  } else {  // left turn: oncoming lanes in the front region
    const Vec2 heading(std::cos(ego_pose.yaw), std::sin(ego_pose.yaw));
    int roi = 0;
    for (const LaneRef& r : refs) {
      const Lane& lane = lanes[r.index];
      const Vec2 dir = polyline_direction_at(lane.centerline, r.ego_arc);
      if (dir.dot(heading) > -0.5) continue;  // not oncoming
      for (const SceneObject& o : objects) {
        const OrientedBox box{o.center, o.yaw, o.length, o.width};
        if (!assigned_to_lane(box, lane)) continue;
        const Vec2 local = ego_pose.to_local(o.center);
        if (local.x() <= 0.0 || local.x() > params.horizon_m) continue;
        RelevantObject rel;
        rel.id = o.id;
        rel.box = box;
        rel.velocity = o.velocity;
        rel.height = o.height;
        rel.q_length = o.q_length;
        rel.q_width = o.q_width;
        rel.rp = o.rp;
        rel.rp_position = o.rp_position;
        rel.roi = roi;
        rel.arc_distance = local.x();
        scene.objects.push_back(rel);
      }
      ++roi;
    }
    // one entry per physical object even when lanes overlap
    std::sort(scene.objects.begin(), scene.objects.end(),
              [](const RelevantObject& a, const RelevantObject& b) { return a.id < b.id; });
    scene.objects.erase(std::unique(scene.objects.begin(), scene.objects.end(),
                                    [](const RelevantObject& a, const RelevantObject& b) {
                                      return a.id == b.id;
                                    }),
                        scene.objects.end());
  }
  return scene;
}

MotFrame FrameMatcher::match(int64_t scan_index, const AugmentedScene& truth,
                             const AugmentedScene& output, StateErrorSamples* errors) {
  MotFrame frame;
  frame.scan_index = scan_index;
  frame.relevant_references = static_cast<int>(truth.objects.size());

  const size_t nt = truth.objects.size();
  const size_t no = output.objects.size();
  std::vector<bool> truth_used(nt, false), out_used(no, false);
  std::vector<std::pair<int, int>> pairs;  // truth idx, output idx

  auto overlap = [&](size_t ti, size_t oi) {
    return box_overlap_area(truth.objects[ti].box, output.objects[oi].box);
  };

  // continuity first: keep existing identities that still overlap
  for (size_t ti = 0; ti < nt; ++ti) {
    const auto it = last_match_.find(truth.objects[ti].id);
    if (it == last_match_.end()) continue;
    for (size_t oi = 0; oi < no; ++oi) {
      if (out_used[oi] || output.objects[oi].id != it->second) continue;
      if (overlap(ti, oi) > params_.overlap_epsilon) {
        truth_used[ti] = true;
        out_used[oi] = true;
        pairs.emplace_back(static_cast<int>(ti), static_cast<int>(oi));
      }
      break;
    }
  }

  // remaining: greedy by overlap area
  struct Cand {
    double area;
    size_t ti, oi;
  };
  std::vector<Cand> cands;
  for (size_t ti = 0; ti < nt; ++ti) {
    if (truth_used[ti]) continue;
    for (size_t oi = 0; oi < no; ++oi) {
      if (out_used[oi]) continue;
      const double a = overlap(ti, oi);
      if (a > params_.overlap_epsilon) cands.push_back({a, ti, oi});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.area > b.area; });
  for (const Cand& c : cands) {
    if (truth_used[c.ti] || out_used[c.oi]) continue;
    truth_used[c.ti] = true;
    out_used[c.oi] = true;
    pairs.emplace_back(static_cast<int>(c.ti), static_cast<int>(c.oi));
  }

  frame.matches = static_cast<int>(pairs.size());
  frame.false_negatives = static_cast<int>(nt) - frame.matches;
  frame.false_positives = static_cast<int>(no) - frame.matches;

  for (const auto& [ti, oi] : pairs) {
    const RelevantObject& t = truth.objects[ti];
    const RelevantObject& o = output.objects[oi];
    auto it = last_match_.find(t.id);
    if (it != last_match_.end() && it->second != o.id) ++frame.id_switches;
    last_match_[t.id] = o.id;

    if (errors) {
      // axis correspondence: the quarter turn aligning the output yaw with
      // the truth yaw decides which truth dimension each estimate measures
      int best_k = 0;
      double best_err = 1e30;
      for (int k = 0; k < 4; ++k) {
        const double err = std::abs(wrap_rad_pi(o.box.yaw + k * 0.5 * kPi - t.box.yaw));
        if (err < best_err) {
          best_err = err;
          best_k = k;
        }
      }
      // truth anchor for the output's reference point label
      const RefPoint truth_label = rotate_ref_point(o.rp, -best_k);
      int fx, fy;
      ref_point_factors(truth_label, fx, fy);
      const Vec2 truth_rp = t.box.center + rotation2d(t.box.yaw) * Vec2(0.5 * t.box.length * fx,
                                                                        0.5 * t.box.width * fy);
      errors->dx.push_back(o.rp_position.x() - truth_rp.x());
      errors->dy.push_back(o.rp_position.y() - truth_rp.y());
      // yaw wrapped to +-90 deg for the axis-symmetric box
      double dyaw = rad_to_deg(wrap_rad_pi(o.box.yaw - t.box.yaw));
      while (dyaw > 90.0) dyaw -= 180.0;
      while (dyaw < -90.0) dyaw += 180.0;
      errors->dyaw_deg.push_back(dyaw);
      const bool swapped = best_k % 2 != 0;
      const double truth_len = swapped ? t.box.width : t.box.length;
      const double truth_wid = swapped ? t.box.length : t.box.width;
      if (o.q_length == QualityClass::kBounded)
        errors->dlen.push_back(o.box.length - truth_len);
      if (o.q_width == QualityClass::kBounded) errors->dwid.push_back(o.box.width - truth_wid);
    }
  }

  // ACC target agreement: both none, or a matched pair
  if (truth.acc_target.has_value() != output.acc_target.has_value()) {
    frame.acc_target_match = false;
  } else if (truth.acc_target.has_value()) {
    frame.acc_target_match = false;
    for (const auto& [ti, oi] : pairs) {
      if (truth.objects[ti].id == *truth.acc_target &&
          output.objects[oi].id == *output.acc_target) {
        frame.acc_target_match = true;
        break;
      }
    }
  }
  return frame;
}

double LatencyReport::mean_first_distance() const {
  if (objects.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& o : objects) sum += o.first_truth_distance;
  return sum / objects.size();
}

double LatencyReport::max_publish_delay() const {
  double worst = -1.0;
  for (const auto& o : objects) worst = std::max(worst, o.publish_delay_s);
  return worst;
}

double LatencyReport::max_hypothesis_delay() const {
  double worst = -1.0;
  for (const auto& o : objects) worst = std::max(worst, o.hypothesis_delay_s);
  return worst;
}

EvalResult evaluate(Scenario scenario, const EvalInput& input, const EvalParams& params) {
  EvalResult result;
  FrameMatcher matcher(params);

  std::map<int64_t, const EvalInput::OutputFrame*> output_by_scan;
  for (const auto& f : input.output) output_by_scan[f.scan_index] = &f;

  int recall_hits = 0, recall_total = 0;

  for (const GroundTruthFrame& tf : input.truth.frames) {
    const auto it = output_by_scan.find(tf.scan_index);
    std::vector<SceneObject> truth_objects;
    for (const TruthObject& o : tf.objects) truth_objects.push_back(scene_object_from_truth(o));

    std::vector<SceneObject> out_objects;
    if (it != output_by_scan.end()) {
      for (const PublishedObject& o : it->second->objects)
        out_objects.push_back(scene_object_from_output(o, it->second->ego_pose));
    }

    const AugmentedScene truth_scene = build_augmented_scene(
        scenario, truth_objects, input.truth.lanes, tf.ego_pose, tf.ego_velocity, params);
    const AugmentedScene out_scene = build_augmented_scene(
        scenario, out_objects, input.truth.lanes, tf.ego_pose, tf.ego_velocity, params);

    const bool warm = tf.t >= params.warmup_s;
    MotFrame frame = matcher.match(tf.scan_index, truth_scene, out_scene,
                                   warm ? &result.mot.errors : nullptr);
    if (!warm) continue;
    result.mot.frames.push_back(frame);
    result.mot.total_matches += frame.matches;
    result.mot.total_fp += frame.false_positives;
    result.mot.total_fn += frame.false_negatives;
    result.mot.total_idsw += frame.id_switches;
    result.mot.total_rro += frame.relevant_references;
    if (scenario == Scenario::kAcc && !frame.acc_target_match) ++result.mot.acc_target_mismatches;
    if (scenario == Scenario::kLeftTurn) {
      recall_total += frame.relevant_references;
      recall_hits += frame.matches;
    }
  }
  result.existence_recall = recall_total ? static_cast<double>(recall_hits) / recall_total : 0.0;

  // latency and range per truth object (all appearances, unfiltered)
  std::map<int, int64_t> first_seen;
  std::map<int, double> first_distance;
  for (const GroundTruthFrame& tf : input.truth.frames) {
    for (const TruthObject& o : tf.objects) {
      if (first_seen.count(o.id)) continue;
      first_seen[o.id] = tf.scan_index;
      first_distance[o.id] = (o.position - tf.ego_pose.position).norm();
    }
  }
  for (const auto& [id, scan0] : first_seen) {
    LatencyReport::PerObject entry;
    entry.id = id;
    entry.first_truth_distance = first_distance[id];

    for (const GroundTruthFrame& tf : input.truth.frames) {
      if (tf.scan_index < scan0) continue;
      const TruthObject* truth_obj = nullptr;
      for (const TruthObject& o : tf.objects)
        if (o.id == id) truth_obj = &o;
      if (!truth_obj) continue;
      const OrientedBox tbox = truth_obj->box();

      if (entry.hypothesis_delay_s < 0.0) {
        const auto hyps = input.hypotheses.find(tf.scan_index);
        if (hyps != input.hypotheses.end()) {
          for (const OrientedBox& h : hyps->second) {
            if (box_overlap_area(tbox, h) > params.overlap_epsilon) {
              entry.hypothesis_delay_s = (tf.scan_index - scan0) * input.scan_period;
              break;
            }
          }
        }
      }
      if (entry.publish_delay_s < 0.0) {
        const auto of = output_by_scan.find(tf.scan_index);
        if (of != output_by_scan.end()) {
          for (const PublishedObject& o : of->second->objects) {
            const SceneObject so = scene_object_from_output(o, of->second->ego_pose);
            if (box_overlap_area(tbox, OrientedBox{so.center, so.yaw, so.length, so.width}) >
                params.overlap_epsilon) {
              entry.publish_delay_s = (tf.scan_index - scan0) * input.scan_period;
              break;
            }
          }
        }
      }
      if (entry.hypothesis_delay_s >= 0.0 && entry.publish_delay_s >= 0.0) break;
    }
    result.latency.objects.push_back(entry);
  }
  return result;
}

namespace {

struct Stats {
  double mean{0.0}, rmse{0.0};
  size_t n{0};
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  s.n = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double sq = 0.0;
  for (const double x : v) sq += x * x;
  s.rmse = std::sqrt(sq / v.size());
  return s;
}

}  // namespace

void write_report(std::ostream& os, Scenario scenario, const EvalResult& result) {
  const auto mota = result.mot.mota();
  os << "{\n";
  os << "  \"scenario\": \"" << to_string(scenario) << "\",\n";
  os << "  \"frames\": " << result.mot.frames.size() << ",\n";
  os << "  \"rro\": " << result.mot.total_rro << ",\n";
  os << "  \"matches\": " << result.mot.total_matches << ",\n";
  os << "  \"false_positives\": " << result.mot.total_fp << ",\n";
  os << "  \"false_negatives\": " << result.mot.total_fn << ",\n";
  os << "  \"id_switches\": " << result.mot.total_idsw << ",\n";
  if (mota) os << "  \"mota\": " << *mota << ",\n";
  else os << "  \"mota\": \"n/a\",\n";
  os << "  \"fp_rate_percent\": " << result.mot.fp_rate() << ",\n";
  os << "  \"fn_rate_percent\": " << result.mot.fn_rate() << ",\n";
  if (scenario == Scenario::kAcc)
    os << "  \"acc_target_mismatches\": " << result.mot.acc_target_mismatches << ",\n";
  if (scenario == Scenario::kLeftTurn)
    os << "  \"existence_recall\": " << result.existence_recall << ",\n";
  const Stats dx = stats_of(result.mot.errors.dx);
  const Stats dy = stats_of(result.mot.errors.dy);
  const Stats dyaw = stats_of(result.mot.errors.dyaw_deg);
  const Stats dlen = stats_of(result.mot.errors.dlen);
  const Stats dwid = stats_of(result.mot.errors.dwid);
  os << "  \"errors\": {\n";
  os << "    \"dx\": {\"mean\": " << dx.mean << ", \"rmse\": " << dx.rmse << ", \"n\": " << dx.n
     << "},\n";
  os << "    \"dy\": {\"mean\": " << dy.mean << ", \"rmse\": " << dy.rmse << ", \"n\": " << dy.n
     << "},\n";
  os << "    \"dyaw_deg\": {\"mean\": " << dyaw.mean << ", \"rmse\": " << dyaw.rmse
     << ", \"n\": " << dyaw.n << "},\n";
  os << "    \"dlen\": {\"mean\": " << dlen.mean << ", \"rmse\": " << dlen.rmse
     << ", \"n\": " << dlen.n << "},\n";
  os << "    \"dwid\": {\"mean\": " << dwid.mean << ", \"rmse\": " << dwid.rmse
     << ", \"n\": " << dwid.n << "}\n";
  os << "  },\n";
  os << "  \"latency\": {\n";
  os << "    \"objects\": " << result.latency.objects.size() << ",\n";
  os << "    \"mean_first_distance\": " << result.latency.mean_first_distance() << ",\n";
  os << "    \"max_hypothesis_delay\": " << result.latency.max_hypothesis_delay() << ",\n";
  os << "    \"max_publish_delay\": " << result.latency.max_publish_delay() << "\n";
  os << "  }\n";
  os << "}\n";
}

void write_error_histograms_csv(std::ostream& os, const StateErrorSamples& samples) {
  os << "state,value\n";
  for (const double v : samples.dx) os << "dx," << v << "\n";
  for (const double v : samples.dy) os << "dy," << v << "\n";
  for (const double v : samples.dyaw_deg) os << "dyaw_deg," << v << "\n";
  for (const double v : samples.dlen) os << "dlen," << v << "\n";
  for (const double v : samples.dwid) os << "dwid," << v << "\n";
}

}  // namespace percept
