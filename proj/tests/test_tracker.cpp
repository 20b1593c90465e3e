#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percept/raycast.hpp"
#include "percept/tracker.hpp"

#include <random>

using namespace percept;

namespace {

RaycastOptions noiseless() {
  RaycastOptions o;
  o.range_noise_sigma = 0.0;
  return o;
}

// Full chain up to hypotheses for one scan.
struct HypChain {
  ConsistencyGrid motion_grid;
  StackGrid stacks;
  SensorConfig sensor = sensor_profile_16();

  HypChain() { motion_grid.configure(MotionParams{}, sensor.max_range_m); }

  std::vector<BoxHypothesis> step(const Scene& scene, int64_t k) {
    SimulatedScan sim = raycast_scan(scene, sensor, k, noiseless());
    const ChannelGeometry geom = ChannelGeometry::build(sim.scan);
    const HeightGrid hg = run_ground_stage(sim.scan, geom, GroundParams{});
    stacks.populate(sim.scan, geom, hg, CompressionParams{});
    stacks.density_filter();
    auto volumes = stacks.condense();
    const auto labeling = cluster(volumes, ClusterParams{}, sensor.n_channels, sensor.azimuth_step_deg);
    motion_grid.update(sim.scan, geom, hg);
    motion_grid.classify_points(sim.scan, geom);
    const auto classes = cluster_vote(labeling, volumes, sim.scan, stacks.point_refs(volumes));
    return generate_hypotheses(volumes, labeling, classes, geom, sim.scan, HypothesisParams{});
  }
};

}  // namespace

TEST_CASE("reference point transform offsets") {
  Vec2 p{0.0, 0.0};
  REQUIRE(transform_reference_point(p, RefPoint::kRL, RefPoint::kC, 0.0, 4.0, 2.0,
                                    QualityClass::kBounded, QualityClass::kBounded));
  CHECK(p.x() == doctest::Approx(2.0));
  CHECK(p.y() == doctest::Approx(1.0));

  Vec2 q{1.0, 1.0};
  REQUIRE(transform_reference_point(q, RefPoint::kFC, RefPoint::kFC, 0.7, 4.0, 2.0,
                                    QualityClass::kBounded, QualityClass::kBounded));
  CHECK(q.x() == doctest::Approx(1.0));
  CHECK(q.y() == doctest::Approx(1.0));

  Vec2 r{0.0, 0.0};
  REQUIRE(transform_reference_point(r, RefPoint::kRL, RefPoint::kC, deg_to_rad(90.0), 4.0, 2.0,
                                    QualityClass::kBounded, QualityClass::kBounded));
  // rotation oracle: R(90) * (2, 1) = (-1, 2)
  CHECK(r.x() == doctest::Approx(-1.0));
  CHECK(r.y() == doctest::Approx(2.0));

  // refused when the moved axis is double-open
  Vec2 s{0.0, 0.0};
  CHECK_FALSE(transform_reference_point(s, RefPoint::kRL, RefPoint::kC, 0.0, 4.0, 2.0,
                                        QualityClass::kDoubleOpen, QualityClass::kBounded));
}

TEST_CASE("reference point round trip is the identity") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> ulabel(0, 8);
  std::uniform_real_distribution<double> uyaw(-3.1, 3.1), udim(0.5, 6.0), upos(-50.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const auto a = static_cast<RefPoint>(ulabel(rng));
    const auto b = static_cast<RefPoint>(ulabel(rng));
    const double yaw = uyaw(rng);
    const double len = udim(rng), wid = udim(rng);
    const Vec2 start{upos(rng), upos(rng)};
    Vec2 p = start;
    REQUIRE(transform_reference_point(p, a, b, yaw, len, wid, QualityClass::kBounded,
                                      QualityClass::kBounded));
    REQUIRE(transform_reference_point(p, b, a, yaw, len, wid, QualityClass::kBounded,
                                      QualityClass::kBounded));
    CHECK((p - start).norm() < 1e-9 * std::max(1.0, start.norm()));
  }
}

TEST_CASE("reference point relabeling under quarter turns") {
  CHECK(rotate_ref_point(RefPoint::kRL, 1) == RefPoint::kRR);
  CHECK(rotate_ref_point(RefPoint::kRR, 2) == RefPoint::kFL);
  CHECK(rotate_ref_point(RefPoint::kC, 3) == RefPoint::kC);
  CHECK(rotate_ref_point(RefPoint::kCL, 2) == RefPoint::kCR);
  // four turns are the identity
  for (int l = 0; l < 9; ++l)
    CHECK(rotate_ref_point(static_cast<RefPoint>(l), 4) == static_cast<RefPoint>(l));
}

TEST_CASE("constant velocity prediction") {
  FilterParams params;
  CvFilter cv;
  cv.init({0.0, 0.0}, params);
  cv.update({0.0, 0.0}, params);
  cv.update({1.0, 0.0}, params);  // builds up velocity, not asserted here
  CvFilter::State s = cv.state();
  // set a clean state through predicted motion instead
  CvFilter cv2;
  cv2.init({5.0, 2.0}, params);
  // hand-roll: vx = 10
  cv2 = CvFilter();
  cv2.init({0.0, 0.0}, params);
  (void)s;

  // direct check of the motion model via the IMM zero-turn limit below
  ModelState m;
  m.x << 0.0, 0.0, 0.0, 10.0, 0.0, 0.0;
  propagate(m, MotionModel::kConstantTurn, 0.1, params);
  CHECK(m.x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.x(1) == doctest::Approx(0.0));
}

TEST_CASE("turn model closed form matches fine-step integration") {
  FilterParams params;
  ModelState m;
  const double v = 10.0, w = 0.5, dt = 0.1, yaw0 = 0.3;
  m.x << 1.0, -2.0, yaw0, v, 0.0, w;
  propagate(m, MotionModel::kConstantTurn, dt, params);

  // 1000-step Euler oracle
  double x = 1.0, y = -2.0, yaw = yaw0;
  const double h = dt / 1000.0;
  for (int i = 0; i < 1000; ++i) {
    x += v * std::cos(yaw) * h;
    y += v * std::sin(yaw) * h;
    yaw += w * h;
  }
  CHECK(std::abs(m.x(0) - x) < 1e-3);
  CHECK(std::abs(m.x(1) - y) < 1e-3);
  CHECK(m.x(2) == doctest::Approx(yaw0 + w * dt));

  // zero turn rate equals straight-line motion exactly
  ModelState z;
  z.x << 0.0, 0.0, 0.5, 8.0, 0.0, 0.0;
  propagate(z, MotionModel::kConstantTurn, 0.1, params);
  CHECK(z.x(0) == doctest::Approx(0.8 * std::cos(0.5)).epsilon(1e-12));
  CHECK(z.x(1) == doctest::Approx(0.8 * std::sin(0.5)).epsilon(1e-12));
}

TEST_CASE("imm model probabilities stay normalized and covariances stay spd") {
  FilterParams params;
  ImmFilter imm;
  imm.init({0.0, 0.0}, 0.0, 5.0, params);
  std::mt19937 rng(17);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::uniform_real_distribution<double> udt(0.02, 0.15);

  double t = 0.0;
  Vec2 pos{0.0, 0.0};
  double yaw = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double dt = udt(rng);
    t += dt;
    // meandering ground truth
    yaw += 0.2 * dt * std::sin(0.1 * t);
    pos += 5.0 * dt * Vec2(std::cos(yaw), std::sin(yaw));
    imm.predict(dt, params);
    imm.update(pos + Vec2(noise(rng), noise(rng)), yaw + 0.05 * noise(rng), params);

    const Eigen::Vector2d mu = imm.model_probabilities();
    CHECK(mu.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu.minCoeff() >= 0.0);
    const auto p = imm.combined_covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(p);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK(imm.finite());
}

TEST_CASE("imm convergence: straight stream favors the accel model, turning favors the turn model") {
  FilterParams params;

  ImmFilter straight;
  straight.init({0.0, 0.0}, 0.0, 10.0, params);
  for (int i = 1; i <= 40; ++i) {
    straight.predict(0.1, params);
    straight.update({i * 1.0, 0.0}, 0.0, params);
  }
  CHECK(straight.model_probabilities()(0) > 0.5);
  CHECK(std::abs(straight.turn_rate()) < 0.05);

  ImmFilter turning;
  turning.init({0.0, 0.0}, 0.0, 10.0, params);
  const double w = 0.5, v = 10.0;
  int needed = -1;
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.1 * i;
    const Vec2 pos{(v / w) * std::sin(w * t), (v / w) * (1.0 - std::cos(w * t))};
    turning.predict(0.1, params);
    turning.update(pos, w * t, params);
    if (needed < 0 && turning.model_probabilities()(1) > turning.model_probabilities()(0))
      needed = i;
  }
  CHECK(needed > 0);
  CHECK(needed <= 10);
}

TEST_CASE("association distance is zero for a self measurement at any reference point") {
  TrackerParams params;
  Tracker tracker(params);

  // seed one track via a hypothesis, give it bounded dims
  BoxHypothesis seed;
  seed.rp_position = {10.0, 5.0};
  seed.yaw = 0.0;
  seed.length = 4.0;
  seed.width = 2.0;
  seed.height = 1.5;
  seed.rp = RefPoint::kC;
  seed.q_length = seed.q_width = QualityClass::kBounded;
  seed.t = 0.0;
  seed.motion = MotionClass::kMovable;
  seed.ambiguity = {0};
  tracker.process({seed}, 0.0, 0.1);
  REQUIRE(tracker.tracks().size() == 1);

  // the same physical box measured at RL: RP position = C + R(yaw)*(-L/2, -W/2)
  BoxHypothesis rl = seed;
  rl.rp = RefPoint::kRL;
  rl.rp_position = Vec2{10.0, 5.0} + Vec2{-2.0, -1.0};
  rl.t = 0.1;

  // distance must be ~0: the track updates with it rather than spawning a new track
  tracker.process({rl}, 0.1, 0.2);
  CHECK(tracker.tracks().size() == 1);
  CHECK(tracker.tracks()[0].update_count == 2);
  CHECK(tracker.tracks()[0].rp == RefPoint::kRL);
  const Vec2 pos = tracker.tracks()[0].rp_position();
  CHECK((pos - rl.rp_position).norm() < 0.05);
}

TEST_CASE("ambiguous interpretations resolve to the smallest orientation error") {
  // I-shape hypothesis with 180-degree ambiguity against a track heading 5 deg
  TrackerParams params;
  Tracker tracker(params);

  BoxHypothesis seed;
  seed.rp_position = {0.0, 0.0};
  seed.yaw = deg_to_rad(5.0);
  seed.length = 4.0;
  seed.width = 2.0;
  seed.rp = RefPoint::kC;
  seed.q_length = seed.q_width = QualityClass::kBounded;
  seed.motion = MotionClass::kMovable;
  seed.ambiguity = {0};
  tracker.process({seed}, 0.0, 0.1);
  // drive it to IMM mode with a few straight updates so it carries a yaw
  for (int i = 1; i <= 4; ++i) {
    BoxHypothesis h = seed;
    h.rp_position = Vec2{i * 1.0, 0.0};
    h.t = 0.0;
    tracker.process({h}, 0.1 * i, 0.1 * i + 0.1);
  }
  REQUIRE(tracker.tracks().size() == 1);
  REQUIRE(tracker.tracks()[0].imm_mode);

  BoxHypothesis flipped = seed;
  flipped.rp_position = Vec2{5.0, 0.0};
  flipped.yaw = wrap_rad_pi(deg_to_rad(5.0) + kPi);  // reported 180 deg off
  flipped.ambiguity = {0, 2};
  flipped.t = 0.0;
  tracker.process({flipped}, 0.5, 0.6);
  REQUIRE(tracker.tracks().size() == 1);
  // the 180-degree interpretation was chosen: yaw stays near 5 deg
  const double yaw = tracker.tracks()[0].imm.yaw();
  CHECK(std::abs(wrap_rad_pi(yaw - deg_to_rad(5.0))) < deg_to_rad(20.0));
}

TEST_CASE("dimension updates respect quality gating") {
  TrackerParams params;
  Tracker tracker(params);

  BoxHypothesis seed;
  seed.rp_position = {0.0, 0.0};
  seed.yaw = 0.0;
  seed.length = 4.0;
  seed.width = 2.0;
  seed.rp = RefPoint::kC;
  seed.q_length = QualityClass::kBounded;
  seed.q_width = QualityClass::kBounded;
  seed.motion = MotionClass::kMovable;
  seed.ambiguity = {0};
  tracker.process({seed}, 0.0, 0.1);
  const double l0 = tracker.tracks()[0].length;
  CHECK(l0 == doctest::Approx(4.0));

  // bounded larger: grows toward the measurement
  BoxHypothesis larger = seed;
  larger.length = 4.8;
  tracker.process({larger}, 0.1, 0.2);
  const double l1 = tracker.tracks()[0].length;
  CHECK(l1 > 4.0);
  CHECK(l1 < 4.8);

  // single-open smaller: unchanged
  BoxHypothesis shorter = seed;
  shorter.length = 2.5;
  shorter.q_length = QualityClass::kSingleOpen;
  tracker.process({shorter}, 0.2, 0.3);
  CHECK(tracker.tracks()[0].length == doctest::Approx(l1));

  // property: open smaller observations never shrink dimensions
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> udim(0.5, 4.0);
  double prev = tracker.tracks()[0].length;
  for (int i = 0; i < 30; ++i) {
    BoxHypothesis h = seed;
    h.length = udim(rng);
    h.q_length = i % 2 == 0 ? QualityClass::kSingleOpen : QualityClass::kDoubleOpen;
    if (h.length >= prev) h.length = prev * 0.9;  // keep them smaller
    tracker.process({h}, 0.3 + 0.1 * i, 0.4 + 0.1 * i);
    CHECK(tracker.tracks()[0].length >= prev - 1e-12);
    prev = tracker.tracks()[0].length;
  }
}

TEST_CASE("lifecycle publish and delete rules") {
  TrackerParams params;

  SUBCASE("three updates but little displacement: not published") {
    Tracker tracker(params);
    for (int i = 0; i < 4; ++i) {
      BoxHypothesis h;
      h.rp_position = {0.25 * i, 0.0};  // 1 m total
      h.yaw = 0.0;
      h.length = 4.0;
      h.width = 2.0;
      h.rp = RefPoint::kC;
      h.q_length = h.q_width = QualityClass::kBounded;
      h.motion = MotionClass::kMovable;
      h.ambiguity = {0};
      h.t = 0.0;
      tracker.process({h}, 0.1 * i, 0.1 * i + 0.1);
    }
    REQUIRE(tracker.tracks().size() == 1);
    CHECK(tracker.tracks()[0].update_count >= 3);
    CHECK_FALSE(tracker.tracks()[0].published);
    CHECK(tracker.publish(3, 0.4, {}).empty());
  }

  SUBCASE("four updates and 2.5 m displacement: published") {
    Tracker tracker(params);
    for (int i = 0; i < 4; ++i) {
      BoxHypothesis h;
      h.rp_position = {0.85 * i, 0.0};
      h.yaw = 0.0;
      h.length = 4.0;
      h.width = 2.0;
      h.rp = RefPoint::kC;
      h.q_length = h.q_width = QualityClass::kBounded;
      h.motion = MotionClass::kMovable;
      h.ambiguity = {0};
      h.t = 0.0;
      tracker.process({h}, 0.1 * i, 0.1 * i + 0.1);
    }
    REQUIRE(tracker.tracks().size() == 1);
    CHECK(tracker.tracks()[0].published);
    CHECK(tracker.publish(3, 0.4, {}).size() == 1);
  }

  SUBCASE("stale tracks die after the time to live") {
    Tracker tracker(params);
    BoxHypothesis h;
    h.rp_position = {5.0, 0.0};
    h.yaw = 0.0;
    h.length = 4.0;
    h.width = 2.0;
    h.rp = RefPoint::kC;
    h.motion = MotionClass::kMovable;
    h.ambiguity = {0};
    h.t = 0.0;
    tracker.process({h}, 0.0, 0.1);
    CHECK(tracker.tracks().size() == 1);
    tracker.process({}, 0.3, 0.45);  // within ttl of the update at t = 0
    CHECK(tracker.tracks().size() == 1);
    tracker.process({}, 0.7, 0.8);  // beyond ttl 0.5
    CHECK(tracker.tracks().empty());
  }
}

TEST_CASE("rear view gives an I shape, corner view an L shape (simulated)") {
  SUBCASE("rear aspect") {
    Scene scene;
    scene.ground.push_back({});
    scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e3, 0.0, 0.0}});
    Actor car;  // directly ahead, driving away: only the rear face visible
    car.id = 1;
    car.trajectory = Trajectory({{12.0, 0.0}, 0.0}, {{1e3, 3.0, 0.0}});
    scene.actors.push_back(car);

    HypChain chain;
    std::vector<BoxHypothesis> hyps;
    for (int64_t k = 0; k < 3; ++k) hyps = chain.step(scene, k);
    REQUIRE(!hyps.empty());
    const BoxHypothesis& h = hyps.front();
    CHECK(h.shape == ShapeClass::kI);
    // the detected edge is the car's 1.8 m rear; bounded along the edge
    CHECK(h.q_length == QualityClass::kBounded);
    CHECK(h.q_width == QualityClass::kSingleOpen);
    CHECK(h.length == doctest::Approx(1.8).epsilon(0.15));
    CHECK((h.rp == RefPoint::kCL || h.rp == RefPoint::kCR));
  }

  SUBCASE("corner aspect") {
    Scene scene;
    scene.ground.push_back({});
    scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e3, 0.0, 0.0}});
    Actor car;  // ahead-left, angled so a corner faces the sensor
    car.id = 1;
    car.trajectory = Trajectory({{12.0, 6.0}, deg_to_rad(-35.0)}, {{1e3, 8.0, 0.0}});
    scene.actors.push_back(car);

    HypChain chain;
    std::vector<BoxHypothesis> hyps;
    for (int64_t k = 0; k < 2; ++k) hyps = chain.step(scene, k);
    REQUIRE(!hyps.empty());
    const BoxHypothesis& h = hyps.front();
    CHECK(h.shape == ShapeClass::kL);
    CHECK(h.q_length == QualityClass::kSingleOpen);
    CHECK(h.q_width == QualityClass::kSingleOpen);
    int fx, fy;
    ref_point_factors(h.rp, fx, fy);
    CHECK(fx != 0);
    CHECK(fy != 0);  // a corner label
  }
}

TEST_CASE("box fit contains the hull and aligns with the edge (square cluster oracle)") {
  // axis-aligned 4 x 2 rectangle of points, viewed from outside
  std::vector<Volume> volumes;
  ClusterLabeling labeling;
  labeling.clusters.emplace_back();
  int idx = 0;
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    for (double y : {-1.0, 1.0}) {
      Volume v;
      const Vec2 p = Vec2{20.0, 0.0} + Vec2{x, y};
      v.r_min = p.norm();
      v.phi_deg = wrap_deg_360(rad_to_deg(std::atan2(p.y(), p.x())));
      v.channel = static_cast<int>(v.phi_deg / 0.2) % 1800;
      v.z_min = 0.25;
      v.h = 1.0;
      v.point_count = 3;
      v.t = 0.0;
      volumes.push_back(v);
      labeling.label.push_back(0);
      labeling.clusters[0].members.push_back(idx++);
      labeling.clusters[0].point_count += 3;
    }
  }
  for (double y = -1.0; y <= 1.0; y += 0.25) {
    Volume v;
    const Vec2 p = Vec2{20.0, 0.0} + Vec2{-2.0, y};
    v.r_min = p.norm();
    v.phi_deg = wrap_deg_360(rad_to_deg(std::atan2(p.y(), p.x())));
    v.channel = static_cast<int>(v.phi_deg / 0.2) % 1800;
    v.z_min = 0.25;
    v.h = 1.0;
    v.point_count = 3;
    v.t = 0.0;
    volumes.push_back(v);
    labeling.label.push_back(0);
    labeling.clusters[0].members.push_back(idx++);
    labeling.clusters[0].point_count += 3;
  }

  SphericalScan scan(sensor_profile_16(), 0, 0.0);
  scan.ego_track().add(0.0, {{0.0, 0.0}, 0.0});
  const ChannelGeometry geom = ChannelGeometry::build(scan);
  const auto hyps = generate_hypotheses(volumes, labeling, {MotionClass::kPotentiallyMovable},
                                        geom, scan, HypothesisParams{});
  REQUIRE(hyps.size() == 1);
  const BoxHypothesis& h = hyps[0];
  const double long_side = std::max(h.length, h.width);
  const double short_side = std::min(h.length, h.width);
  CHECK(long_side >= 4.0 - 1e-9);
  CHECK(short_side >= 2.0 - 1e-9);
  CHECK(long_side < 4.3);
  CHECK(short_side < 2.3);
  const double yaw_err = std::abs(wrap_deg_180(rad_to_deg(h.yaw)));
  CHECK(std::min(yaw_err, std::abs(yaw_err - 90.0)) < 4.0);
}

TEST_CASE("occlusion reasoning downgrades dimensions per flank") {
  SensorConfig cfg = sensor_profile_16();
  HypothesisParams params;

  auto make_scene = [&](bool occlude_low, bool occlude_high) {
    SphericalScan scan(cfg, 0, 0.0);
    scan.ego_track().add(0.0, {{0.0, 0.0}, 0.0});

    // object edge along channels 100..120 at 20 m
    HypothesisMembers members;
    for (int c = 100; c <= 120; ++c) {
      members.channels.push_back(c);
      const double az = deg_to_rad((c + 0.5) * 0.2);
      members.points.push_back(20.0 * Vec2(std::cos(az), std::sin(az)));
    }
    members.r_nearest = 20.0;

    auto put_return = [&scan](int channel, double range) {
      Measurement m;
      m.range = range;
      m.azimuth_deg = (channel + 0.5) * 0.2;
      m.elevation_deg = -0.6;
      m.valid = true;
      scan.insert({12, channel, 0}, m);
      scan.attributes({12, channel, 0}).ground_class = GroundClass::kElevated;
    };
    if (occlude_low) put_return(99, 8.0);
    if (occlude_high) put_return(121, 8.0);

    BoxHypothesis hyp;
    hyp.yaw = std::atan2(members.points.back().y() - members.points.front().y(),
                         members.points.back().x() - members.points.front().x());
    const MinAreaRect rect = bounding_rect_with_yaw(members.points, hyp.yaw);
    hyp.length = std::max(rect.length, 0.2);
    hyp.width = std::max(rect.width, 0.2);
    hyp.rp = RefPoint::kCL;
    hyp.rp_position = rect.center;
    hyp.q_length = QualityClass::kBounded;
    hyp.q_width = QualityClass::kSingleOpen;
    hyp.shape = ShapeClass::kI;

    const ChannelGeometry geom = ChannelGeometry::build(scan);
    occlusion_reasoning(hyp, members, scan, geom, params);
    return hyp;
  };

  const BoxHypothesis clear = make_scene(false, false);
  CHECK(clear.q_length == QualityClass::kBounded);

  const BoxHypothesis one = make_scene(true, false);
  CHECK(one.q_length == QualityClass::kSingleOpen);

  const BoxHypothesis both = make_scene(true, true);
  CHECK(both.q_length == QualityClass::kDoubleOpen);
}

TEST_CASE("straight driving vehicle is published within 1.1 s of first appearance") {
  Scene scene;
  scene.ground.push_back({});
  scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e3, 0.0, 0.0}});
  Actor car;
  car.id = 1;
  car.trajectory = Trajectory({{15.0, -8.0}, deg_to_rad(90.0)}, {{1e3, 10.0, 0.0}});
  scene.actors.push_back(car);

  HypChain chain;
  Tracker tracker;
  int64_t published_at = -1;
  for (int64_t k = 0; k < 12 && published_at < 0; ++k) {
    const auto hyps = chain.step(scene, k);
    tracker.process(hyps, 0.1 * k, 0.1 * (k + 1));
    if (!tracker.publish(k, 0.1 * (k + 1), {}).empty()) published_at = k;
  }
  REQUIRE(published_at >= 0);
  CHECK(0.1 * (published_at + 1) <= 1.1);
}
