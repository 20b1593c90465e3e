#include "percept/tracker.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>

namespace percept {

void TrackerParams::validate() const {
  if (ttl_s <= 0.0) throw ValidationError("tracker: ttl must be positive");
  if (publish_min_updates < 1) throw ValidationError("tracker: publish updates must be >= 1");
  if (publish_min_displacement_m < 0.0)
    throw ValidationError("tracker: publish displacement must be >= 0");
  if (dim_blend <= 0.0 || dim_blend > 1.0)
    throw ValidationError("tracker: dimension blend must be in (0, 1]");
}

double chi2_gate_99(int dof) {
  switch (dof) {
    case 2: return 9.210;
    case 3: return 11.345;
    case 4: return 13.277;
    case 5: return 15.086;
    default: return 16.812;
  }
}

double TrackedObject::heading(double heading_speed_min) const {
  if (imm_mode) return imm.yaw();
  const Vec2 v = cv.velocity();
  if (v.norm() > heading_speed_min) return std::atan2(v.y(), v.x());
  return last_hyp_yaw;
}

Vec2 TrackedObject::center(double heading_speed_min) const {
  const double yaw = heading(heading_speed_min);
  return rp_position() + rotation2d(yaw) * ref_point_offset(rp, RefPoint::kC, length, width);
}

bool transform_reference_point(Vec2& position, RefPoint from, RefPoint to, double yaw,
                               double length, double width, QualityClass q_length,
                               QualityClass q_width) {
  int fx0, fy0, fx1, fy1;
  ref_point_factors(from, fx0, fy0);
  ref_point_factors(to, fx1, fy1);
  if (fx0 != fx1 && q_length == QualityClass::kDoubleOpen) return false;
  if (fy0 != fy1 && q_width == QualityClass::kDoubleOpen) return false;
  position += rotation2d(yaw) * ref_point_offset(from, to, length, width);
  return true;
}

Tracker::Tracker(const TrackerParams& params) : params_(params) { params_.validate(); }

void Tracker::predict_track(TrackedObject& track, double dt) const {
  if (dt <= 0.0) return;
  if (track.imm_mode) track.imm.predict(dt, params_.filter);
  else track.cv.predict(dt, params_.filter);
}

namespace {

struct Interpretation {
  double yaw;
  double length, width;
  QualityClass q_length, q_width;
  RefPoint rp;
};

Interpretation interpret(const BoxHypothesis& hyp, int k) {
  Interpretation out;
  out.yaw = wrap_rad_pi(hyp.yaw + k * 0.5 * kPi);
  if (k % 2 == 0) {
    out.length = hyp.length;
    out.width = hyp.width;
    out.q_length = hyp.q_length;
    out.q_width = hyp.q_width;
  } else {
    out.length = hyp.width;
    out.width = hyp.length;
    out.q_length = hyp.q_width;
    out.q_width = hyp.q_length;
  }
  out.rp = rotate_ref_point(hyp.rp, k);
  return out;
}

}  // namespace

bool Tracker::candidate_distance(const TrackedObject& track, const BoxHypothesis& hyp,
                                 double t_hyp, Candidate& out) const {
  TrackedObject predicted = track;
  predict_track(predicted, t_hyp - track.last_update_time);

  const double track_yaw = predicted.heading(params_.heading_speed_min);
  const bool yaw_known = predicted.imm_mode || predicted.speed() > params_.heading_speed_min;

  // interpretation with the smallest orientation error
  int best_k = hyp.ambiguity.empty() ? 0 : hyp.ambiguity.front();
  if (yaw_known) {
    double best_err = 1e30;
    for (const int k : hyp.ambiguity) {
      const double err = std::abs(wrap_rad_pi(interpret(hyp, k).yaw - track_yaw));
      if (err < best_err) {
        best_err = err;
        best_k = k;
      }
    }
  }
  const Interpretation in = interpret(hyp, best_k);

  // track state expressed at the hypothesis reference point label
  Vec2 track_pos = predicted.rp_position();
  Vec2 meas_pos = hyp.rp_position;
  double extra_var = 0.0;
  if (!transform_reference_point(track_pos, predicted.rp, in.rp, track_yaw, predicted.length,
                                 predicted.width, predicted.q_length, predicted.q_width)) {
    // fall back to comparing box centers
    track_pos = predicted.center(params_.heading_speed_min);
    meas_pos = hyp.rp_position +
               rotation2d(in.yaw) * ref_point_offset(in.rp, RefPoint::kC, in.length, in.width);
    extra_var = params_.dim_sigma_m * params_.dim_sigma_m;
  }

  double d2;
  int dof;
  if (predicted.imm_mode) {
    ImmFilter shifted = predicted.imm;
    shifted.shift_position(track_pos - predicted.imm.position());
    FilterParams fp = params_.filter;
    fp.pos_meas_sigma = std::sqrt(fp.pos_meas_sigma * fp.pos_meas_sigma + extra_var);
    d2 = shifted.gating_distance(meas_pos, in.yaw, fp);
    dof = 3;
  } else {
    CvFilter shifted = predicted.cv;
    shifted.set_position(track_pos);
    FilterParams fp = params_.filter;
    fp.pos_meas_sigma = std::sqrt(fp.pos_meas_sigma * fp.pos_meas_sigma + extra_var);
    d2 = shifted.gating_distance(meas_pos, fp);
    dof = 2;
  }

  // dimensional terms, quality gated: a partially observed smaller extent
  // says nothing about the true size
  if (track.update_count > 0) {
    const double var = params_.dim_sigma_m * params_.dim_sigma_m;
    if (!(in.q_length != QualityClass::kBounded && in.length < predicted.length)) {
      const double d = in.length - predicted.length;
      d2 += d * d / var;
      ++dof;
    }
    if (!(in.q_width != QualityClass::kBounded && in.width < predicted.width)) {
      const double d = in.width - predicted.width;
      d2 += d * d / var;
      ++dof;
    }
  }

  out.quarter_turns = best_k;
  out.distance2 = d2;
  out.gate = chi2_gate_99(dof);
  return d2 <= out.gate;
}

void Tracker::update_track(TrackedObject& track, const BoxHypothesis& hyp, double t_hyp,
                           int association_k) {
  predict_track(track, t_hyp - track.last_update_time);

  // ambiguity resolution by motion direction when the object is moving
  int k = association_k;
  if (track.speed() > params_.heading_speed_min) {
    const Vec2 v = track.velocity();
    const double motion_dir = std::atan2(v.y(), v.x());
    double best_err = 1e30;
    for (const int cand : hyp.ambiguity) {
      const double err = std::abs(wrap_rad_pi(interpret(hyp, cand).yaw - motion_dir));
      if (err < best_err) {
        best_err = err;
        k = cand;
      }
    }
  }
  const Interpretation in = interpret(hyp, k);
  const double track_yaw = track.heading(params_.heading_speed_min);

  Vec2 track_pos = track.rp_position();
  Vec2 meas_pos = hyp.rp_position;
  RefPoint anchor;
  if (transform_reference_point(track_pos, track.rp, in.rp, track_yaw, track.length, track.width,
                                track.q_length, track.q_width)) {
    // move the track anchor onto the hypothesis label
    anchor = in.rp;
    if (track.imm_mode) track.imm.shift_position(track_pos - track.imm.position());
    else track.cv.set_position(track_pos);
  } else if (transform_reference_point(meas_pos, in.rp, track.rp, in.yaw, in.length, in.width,
                                       in.q_length, in.q_width)) {
    anchor = track.rp;  // measurement mapped onto the existing anchor
  } else {
    anchor = track.rp;  // both labels open; take the raw position as-is
    meas_pos = hyp.rp_position;
  }

  if (track.imm_mode) {
    track.imm.update(meas_pos, in.yaw, params_.filter);
    if (!track.imm.finite()) {
      track.marked_for_deletion = true;
      return;
    }
  } else {
    track.cv.update(meas_pos, params_.filter);
    if (!track.cv.finite()) {
      track.marked_for_deletion = true;
      return;
    }
  }
  track.rp = anchor;
  track.last_hyp_yaw = in.yaw;

  // dimensional states under quality gating: bounded measurements pull the
  // estimate both ways, open ones only ever enlarge it
  auto update_dim = [this](double& dim, QualityClass& q, double meas, QualityClass meas_q) {
    if (meas_q == QualityClass::kBounded) {
      dim += params_.dim_blend * (meas - dim);
      q = QualityClass::kBounded;
    } else if (meas > dim) {
      dim = meas;
      q = std::min(q, meas_q);
    }
  };
  update_dim(track.length, track.q_length, in.length, in.q_length);
  update_dim(track.width, track.q_width, in.width, in.q_width);
  update_dim(track.height, track.q_height, hyp.height, hyp.q_height);

  track.motion = hyp.motion;
  track.last_update_time = t_hyp;
  ++track.update_count;
  track.max_speed_seen = std::max(track.max_speed_seen, track.speed());
  maybe_switch_mode(track);

  if (!track.published && track.update_count >= params_.publish_min_updates &&
      (track.center(params_.heading_speed_min) - track.first_detection_center).norm() >=
          params_.publish_min_displacement_m) {
    track.published = true;
  }
}

void Tracker::maybe_switch_mode(TrackedObject& track) {
  const bool vehicle_like = track.length >= params_.vehicle_length_min_m &&
                            track.length <= params_.vehicle_length_max_m &&
                            track.width >= params_.vehicle_width_min_m &&
                            track.width <= params_.vehicle_width_max_m &&
                            track.max_speed_seen <= params_.vehicle_speed_max;
  if (!track.imm_mode && vehicle_like && track.update_count >= 2) {
    const Vec2 v = track.cv.velocity();
    const double speed = v.norm();
    const double yaw = speed > params_.heading_speed_min ? std::atan2(v.y(), v.x())
                                                         : track.last_hyp_yaw;
    track.imm.init(track.cv.position(), yaw, speed, params_.filter);
    track.imm_mode = true;
  } else if (track.imm_mode && !vehicle_like) {
    track.cv.init(track.imm.position(), params_.filter);
    track.imm_mode = false;
  }
}

void Tracker::spawn_track(const BoxHypothesis& hyp, double t_hyp) {
  TrackedObject track;
  track.id = next_id_++;
  track.imm_mode = false;
  track.cv.init(hyp.rp_position, params_.filter);
  track.length = hyp.length;
  track.width = hyp.width;
  track.height = hyp.height;
  track.q_length = hyp.q_length;
  track.q_width = hyp.q_width;
  track.q_height = hyp.q_height;
  track.rp = hyp.rp;
  track.motion = hyp.motion;
  track.update_count = 1;
  track.last_update_time = t_hyp;
  track.last_hyp_yaw = hyp.yaw;
  track.first_detection_center = hyp.center();
  tracks_.push_back(std::move(track));
}

void Tracker::process(const std::vector<BoxHypothesis>& hypotheses, double t_start, double t_end) {
  // gated candidates; a coarse euclidean pre-gate avoids predicting a track
  // copy against every hypothesis in the scan
  std::vector<Candidate> candidates;
  for (size_t ti = 0; ti < tracks_.size(); ++ti) {
    const TrackedObject& track = tracks_[ti];
    if (track.marked_for_deletion) continue;
    const Vec2 pos = track.rp_position();
    const double reach = 8.0 + track.speed() * 0.3 + track.length + track.width;
    for (size_t hi = 0; hi < hypotheses.size(); ++hi) {
      if ((hypotheses[hi].rp_position - pos).norm() > reach) continue;
      Candidate c;
      c.track = ti;
      c.hyp = hi;
      if (candidate_distance(track, hypotheses[hi], t_start + hypotheses[hi].t, c))
        candidates.push_back(c);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.distance2 < b.distance2; });

  std::vector<bool> track_used(tracks_.size(), false);
  std::vector<bool> hyp_used(hypotheses.size(), false);
  for (const Candidate& c : candidates) {
    if (track_used[c.track] || hyp_used[c.hyp]) continue;
    track_used[c.track] = true;
    hyp_used[c.hyp] = true;
    update_track(tracks_[c.track], hypotheses[c.hyp], t_start + hypotheses[c.hyp].t,
                 c.quarter_turns);
  }

  // new objects from unassociated non-stationary hypotheses
  for (size_t hi = 0; hi < hypotheses.size(); ++hi) {
    if (hyp_used[hi]) continue;
    if (hypotheses[hi].motion == MotionClass::kStationary) continue;
    spawn_track(hypotheses[hi], t_start + hypotheses[hi].t);
  }

  // time-to-live
  std::erase_if(tracks_, [&](const TrackedObject& t) {
    return t.marked_for_deletion || (t_end - t.last_update_time) > params_.ttl_s;
  });
}

std::vector<PublishedObject> Tracker::publish(int64_t scan_index, double t,
                                              const Pose2& ego) const {
  std::vector<PublishedObject> out;
  for (const TrackedObject& track : tracks_) {
    if (!track.published) continue;
    TrackedObject snap = track;
    predict_track(snap, t - track.last_update_time);
    PublishedObject o;
    o.scan_index = scan_index;
    o.id = track.id;
    o.position = ego.to_local(snap.rp_position());
    o.yaw = wrap_rad_pi(snap.heading(params_.heading_speed_min) - ego.yaw);
    o.velocity = rotation2d(-ego.yaw) * snap.velocity();
    o.length = snap.length;
    o.width = snap.width;
    o.height = snap.height;
    o.q_length = snap.q_length;
    o.q_width = snap.q_width;
    o.q_height = snap.q_height;
    o.rp = snap.rp;
    o.imm_mode = snap.imm_mode;
    out.push_back(o);
  }
  return out;
}

}  // namespace percept
