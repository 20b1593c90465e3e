#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percept/eval.hpp"

using namespace percept;

namespace {

Lane straight_lane(int id, double y_center, double width = 3.5, double length = 200.0) {
  Lane lane;
  lane.id = id;
  lane.width = width;
  lane.centerline = {{-20.0, y_center}, {length, y_center}};
  return lane;
}

SceneObject car(int id, double x, double y, double yaw = 0.0, double vx = 8.0, double vy = 0.0) {
  SceneObject o;
  o.id = id;
  o.center = {x, y};
  o.yaw = yaw;
  o.length = 4.5;
  o.width = 1.8;
  o.height = 1.5;
  o.velocity = {vx, vy};
  o.rp = RefPoint::kC;
  o.rp_position = o.center;
  return o;
}

RelevantObject rel(const SceneObject& o) {
  RelevantObject r;
  r.id = o.id;
  r.box = {o.center, o.yaw, o.length, o.width};
  r.velocity = o.velocity;
  r.q_length = o.q_length;
  r.q_width = o.q_width;
  r.rp = o.rp;
  r.rp_position = o.rp_position;
  return r;
}

}  // namespace

TEST_CASE("corner-in-lane assignment") {
  const Lane lane = straight_lane(1, 0.0);
  CHECK(assigned_to_lane({{20.0, 0.0}, 0.0, 4.5, 1.8}, lane));
  // fully inside the neighbor lane: no corner inside
  CHECK_FALSE(assigned_to_lane({{20.0, 3.5}, 0.0, 4.5, 1.8}, lane));
  // straddling the boundary with one corner inside
  CHECK(assigned_to_lane({{20.0, 2.5}, 0.0, 4.5, 1.8}, lane));
}

TEST_CASE("acc target selection by idm demand") {
  EvalParams params;
  const std::vector<Lane> lanes = {straight_lane(1, 0.0)};
  const Pose2 ego{{0.0, 0.0}, 0.0};
  const Vec2 ego_v{12.0, 0.0};

  SUBCASE("single slower lead") {
    const auto scene =
        build_augmented_scene(Scenario::kAcc, {car(7, 25.0, 0.0, 0.0, 6.0)}, lanes, ego, ego_v, params);
    REQUIRE(scene.acc_target.has_value());
    CHECK(*scene.acc_target == 7);
  }

  SUBCASE("near slow object vs far fast object: larger demand wins") {
    const SceneObject near_slow = car(1, 18.0, 0.0, 0.0, 5.0);
    const SceneObject far_fast = car(2, 55.0, 0.0, 0.0, 13.0);
    const auto scene = build_augmented_scene(Scenario::kAcc, {near_slow, far_fast}, lanes, ego,
                                             ego_v, params);
    REQUIRE(scene.acc_target.has_value());
    // direct oracle over both candidates
    const double d1 = idm_required_deceleration(12.0, 5.0, 18.0 - 2.25, params);
    const double d2 = idm_required_deceleration(12.0, 13.0, 55.0 - 2.25, params);
    CHECK(*scene.acc_target == (d1 > d2 ? 1 : 2));
    CHECK(*scene.acc_target == 1);
  }

  SUBCASE("no preceding object") {
    const auto scene =
        build_augmented_scene(Scenario::kAcc, {car(3, -15.0, 0.0)}, lanes, ego, ego_v, params);
    CHECK_FALSE(scene.acc_target.has_value());
  }
}

TEST_CASE("lane change relevance keeps the configured count per region") {
  EvalParams params;
  const std::vector<Lane> lanes = {straight_lane(1, 0.0), straight_lane(2, 3.5),
                                   straight_lane(3, -3.5)};
  const Pose2 ego{{0.0, 0.0}, 0.0};
  std::vector<SceneObject> objects;
  int id = 1;
  for (double x : {8.0, 16.0, 24.0, -8.0, -16.0, -24.0})
    for (double y : {0.0, 3.5, -3.5}) objects.push_back(car(id++, x, y));

  const auto all = build_augmented_scene(Scenario::kLaneChange, objects, lanes, ego, {10, 0}, params);
  CHECK(all.objects.size() == 12);  // 6 rois x 2

  EvalParams first_only = params;
  first_only.lane_change_first_only = true;
  const auto lc1 =
      build_augmented_scene(Scenario::kLaneChange, objects, lanes, ego, {10, 0}, first_only);
  CHECK(lc1.objects.size() == 6);
  for (const auto& o : lc1.objects) CHECK(std::abs(o.arc_distance) <= 8.1);
}

TEST_CASE("frame matching: identity, misses, and id switches") {
  EvalParams params;
  FrameMatcher matcher(params);

  AugmentedScene truth;
  truth.objects = {rel(car(1, 10.0, 0.0)), rel(car(2, 30.0, 0.0))};

  SUBCASE("identical sets match completely") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};
    const MotFrame f = matcher.match(0, truth, out);
    CHECK(f.matches == 2);
    CHECK(f.false_positives == 0);
    CHECK(f.false_negatives == 0);
    CHECK(f.id_switches == 0);
  }

  SUBCASE("a displaced box is one FP plus one FN") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 8.0))};
    const MotFrame f = matcher.match(0, truth, out);
    CHECK(f.matches == 1);
    CHECK(f.false_positives == 1);
    CHECK(f.false_negatives == 1);
  }

  SUBCASE("swapping ids between frames counts switches") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};
    matcher.match(0, truth, out);
    AugmentedScene swapped;
    swapped.objects = {rel(car(102, 10.0, 0.0)), rel(car(101, 30.0, 0.0))};
    const MotFrame f = matcher.match(1, truth, swapped);
    CHECK(f.id_switches == 2);
  }

  SUBCASE("continuity preferred when boxes still overlap") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};
    matcher.match(0, truth, out);
    // both outputs drift toward each other but keep overlapping their own
    AugmentedScene drift;
    drift.objects = {rel(car(101, 11.5, 0.0)), rel(car(102, 28.5, 0.0))};
    const MotFrame f = matcher.match(1, truth, drift);
    CHECK(f.matches == 2);
    CHECK(f.id_switches == 0);
  }
}

TEST_CASE("mota arithmetic") {
  MotReport report;
  report.total_rro = 100;
  report.total_fp = 5;
  report.total_fn = 10;
  report.total_idsw = 1;
  REQUIRE(report.mota().has_value());
  CHECK(*report.mota() == doctest::Approx(0.84));

  MotReport zero;
  zero.total_rro = 0;
  CHECK_FALSE(zero.mota().has_value());

  MotReport perfect;
  perfect.total_rro = 50;
  CHECK(*perfect.mota() == doctest::Approx(1.0));
}

TEST_CASE("mota on a five-frame fixture equals hand arithmetic") {
  EvalParams params;
  FrameMatcher matcher(params);
  MotReport report;

  // frames: 2 truth objects each. Frame 0: perfect. Frame 1: one FN.
  // Frame 2: one FP. Frame 3: id switch on object 1. Frame 4: perfect.
  AugmentedScene truth;
  truth.objects = {rel(car(1, 10.0, 0.0)), rel(car(2, 30.0, 0.0))};

  std::vector<AugmentedScene> outs(5);
  outs[0].objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};
  outs[1].objects = {rel(car(101, 10.0, 0.0))};
  outs[2].objects = {rel(car(101, 10.0, 0.0)), rel(car(102, 30.0, 0.0)),
                     rel(car(103, 50.0, 0.0))};
  // frame 2's extra box must lie inside the relevance set to count: place it
  // overlapping nothing but still "relevant" by construction here
  outs[3].objects = {rel(car(105, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};
  outs[4].objects = {rel(car(105, 10.0, 0.0)), rel(car(102, 30.0, 0.0))};

  for (int f = 0; f < 5; ++f) {
    const MotFrame frame = matcher.match(f, truth, outs[f]);
    report.frames.push_back(frame);
    report.total_fp += frame.false_positives;
    report.total_fn += frame.false_negatives;
    report.total_idsw += frame.id_switches;
    report.total_rro += frame.relevant_references;
  }
  // hand arithmetic: RRO = 10, FN = 1, FP = 1, IDsw = 1 -> 1 - 3/10 = 0.7
  CHECK(report.total_rro == 10);
  CHECK(report.total_fn == 1);
  CHECK(report.total_fp == 1);
  CHECK(report.total_idsw == 1);
  CHECK(*report.mota() == doctest::Approx(0.7));
}

TEST_CASE("state error samples honor symmetry wrapping and quality gating") {
  EvalParams params;
  FrameMatcher matcher(params);
  StateErrorSamples samples;

  AugmentedScene truth;
  truth.objects = {rel(car(1, 10.0, 0.0))};

  SUBCASE("perfect match has zero errors") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0))};
    matcher.match(0, truth, out, &samples);
    REQUIRE(samples.dx.size() == 1);
    CHECK(samples.dx[0] == doctest::Approx(0.0));
    CHECK(samples.dy[0] == doctest::Approx(0.0));
    CHECK(samples.dyaw_deg[0] == doctest::Approx(0.0));
    CHECK(samples.dlen[0] == doctest::Approx(0.0));
  }

  SUBCASE("a 180-degree flip wraps to zero yaw error") {
    AugmentedScene out;
    out.objects = {rel(car(101, 10.0, 0.0, kPi))};
    matcher.match(0, truth, out, &samples);
    REQUIRE(samples.dyaw_deg.size() == 1);
    CHECK(samples.dyaw_deg[0] == doctest::Approx(0.0));
  }

  SUBCASE("open shorter length is excluded from the length samples") {
    SceneObject shorter = car(101, 10.0, 0.0);
    shorter.length = 3.0;
    shorter.q_length = QualityClass::kSingleOpen;
    AugmentedScene out;
    out.objects = {rel(shorter)};
    matcher.match(0, truth, out, &samples);
    CHECK(samples.dlen.empty());
    CHECK(samples.dwid.size() == 1);
  }
}

TEST_CASE("relevance filtering with errors inside kept regions never raises mota") {
  EvalParams params;
  // full view: 4 truth objects, output misses one (error inside the kept roi)
  AugmentedScene truth_full;
  truth_full.objects = {rel(car(1, 10.0, 0.0)), rel(car(2, 30.0, 0.0)), rel(car(3, 60.0, 0.0)),
                        rel(car(4, 90.0, 0.0))};
  AugmentedScene out_full;
  out_full.objects = {rel(car(101, 30.0, 0.0)), rel(car(102, 60.0, 0.0)),
                      rel(car(103, 90.0, 0.0))};  // object 1 missing

  FrameMatcher m1(params);
  const MotFrame full = m1.match(0, truth_full, out_full);
  const double mota_full =
      1.0 - static_cast<double>(full.false_positives + full.false_negatives) /
                full.relevant_references;

  // filtered view drops the two far objects (no errors there)
  AugmentedScene truth_filtered;
  truth_filtered.objects = {rel(car(1, 10.0, 0.0)), rel(car(2, 30.0, 0.0))};
  AugmentedScene out_filtered;
  out_filtered.objects = {rel(car(101, 30.0, 0.0))};
  FrameMatcher m2(params);
  const MotFrame filt = m2.match(0, truth_filtered, out_filtered);
  const double mota_filtered =
      1.0 - static_cast<double>(filt.false_positives + filt.false_negatives) /
                filt.relevant_references;

  CHECK(mota_filtered <= mota_full + 1e-12);
}

TEST_CASE("fp and fn swap when truth and output swap on symmetric fixtures") {
  EvalParams params;
  AugmentedScene a;
  a.objects = {rel(car(1, 10.0, 0.0)), rel(car(2, 30.0, 0.0))};
  AugmentedScene b;
  b.objects = {rel(car(10, 10.0, 0.0))};

  FrameMatcher m1(params);
  const MotFrame ab = m1.match(0, a, b);
  FrameMatcher m2(params);
  const MotFrame ba = m2.match(0, b, a);
  CHECK(ab.false_negatives == ba.false_positives);
  CHECK(ab.false_positives == ba.false_negatives);
  CHECK(ab.matches == ba.matches);
}

TEST_CASE("left turn existence recall over oncoming lanes") {
  EvalParams params;
  params.warmup_s = 0.0;
  // ego heading +x; oncoming lane at y=4 pointing -x
  Lane oncoming;
  oncoming.id = 2;
  oncoming.width = 3.5;
  oncoming.centerline = {{120.0, 4.0}, {-20.0, 4.0}};

  EvalInput input;
  input.truth.lanes = {straight_lane(1, 0.0), oncoming};
  for (int k = 0; k < 10; ++k) {
    GroundTruthFrame f;
    f.scan_index = k;
    f.t = 0.1 * (k + 1);
    f.ego_pose = {{0.0, 0.0}, 0.0};
    f.ego_velocity = {0.0, 0.0};
    TruthObject o;
    o.id = 5;
    o.position = {40.0 - 1.5 * k, 4.0};
    o.yaw = kPi;
    o.length = 4.5;
    o.width = 1.8;
    o.height = 1.5;
    o.velocity = {-15.0, 0.0};
    f.objects.push_back(o);
    input.truth.frames.push_back(f);

    EvalInput::OutputFrame of;
    of.scan_index = k;
    of.t = f.t;
    of.ego_pose = f.ego_pose;
    if (k >= 5) {  // detected from frame 5 on
      PublishedObject p;
      p.id = 77;
      p.position = o.position;  // ego frame == world here
      p.yaw = o.yaw;
      p.length = 4.4;
      p.width = 1.7;
      p.height = 1.5;
      p.q_length = p.q_width = p.q_height = QualityClass::kBounded;
      p.rp = RefPoint::kC;
      p.velocity = o.velocity;
      of.objects.push_back(p);
    }
    input.output.push_back(of);
  }

  const EvalResult result = evaluate(Scenario::kLeftTurn, input, params);
  CHECK(result.existence_recall == doctest::Approx(0.5));
  REQUIRE(result.latency.objects.size() == 1);
  CHECK(result.latency.objects[0].publish_delay_s == doctest::Approx(0.5));
  CHECK(result.latency.objects[0].first_truth_distance == doctest::Approx(std::hypot(40.0, 4.0)));
}
