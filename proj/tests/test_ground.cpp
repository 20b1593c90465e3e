#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percept/ground.hpp"
#include "percept/raycast.hpp"

using namespace percept;

namespace {

RaycastOptions noiseless() {
  RaycastOptions o;
  o.range_noise_sigma = 0.0;
  return o;
}

Scene flat_scene() {
  Scene scene;
  scene.ground.push_back({});
  scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e3, 0.0, 0.0}});
  return scene;
}

struct Prepared {
  SphericalScan scan;
  ChannelGeometry geom;
  HeightGrid grid;
};

Prepared run_stage(const Scene& scene, const GroundParams& params = {}) {
  SimulatedScan sim = raycast_scan(scene, sensor_profile_16(), 0, noiseless());
  ChannelGeometry geom = ChannelGeometry::build(sim.scan);
  HeightGrid grid = run_ground_stage(sim.scan, geom, params);
  return {std::move(sim.scan), std::move(geom), std::move(grid)};
}

}  // namespace

TEST_CASE("flat plane: every first-target return is a candidate and ground") {
  const Prepared r = run_stage(flat_scene());
  int total = 0;
  for (size_t i = 0; i < r.scan.cell_count(); ++i) {
    const Measurement& m = r.scan.at(i);
    if (!m.valid || m.target_index != 0) continue;
    ++total;
    CHECK(r.scan.attributes(i).has(AttributeSet::kGroundCandidate));
    CHECK(r.scan.attributes(i).ground_class == GroundClass::kGround);
  }
  CHECK(total > 10000);
}

TEST_CASE("vertical wall points are not candidates and classify elevated") {
  Scene scene = flat_scene();
  StaticBox wall;
  wall.footprint = {{10.5, 0.0}, 0.0, 1.0, 40.0};
  wall.height = 4.0;
  scene.static_boxes.push_back(wall);
  const Prepared r = run_stage(scene);

  int wall_points = 0;
  for (size_t i = 0; i < r.scan.cell_count(); ++i) {
    const Measurement& m = r.scan.at(i);
    if (!m.valid || m.target_index != 0) continue;
    const double z = r.scan.sensor_relative_z(m) + 2.0;  // height above flat ground
    if (z > 0.5) {  // clearly on the wall face
      CHECK_FALSE(r.scan.attributes(i).has(AttributeSet::kGroundCandidate));
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kElevated);
      ++wall_points;
    }
  }
  CHECK(wall_points > 100);
}

TEST_CASE("10 percent grade road stays ground with 15 deg slope limit") {
  Scene scene = flat_scene();
  // flat apron around the ego, then a 10% ramp
  scene.ground.clear();
  GroundPatch flat;
  flat.x_max = 10.0;
  scene.ground.push_back(flat);
  GroundPatch ramp;
  ramp.x_min = 10.0;
  ramp.x0 = 10.0;
  ramp.slope_x = 0.10;
  scene.ground.push_back(ramp);

  const Prepared r = run_stage(scene);
  int ramp_points = 0;
  for (size_t i = 0; i < r.scan.cell_count(); ++i) {
    const Measurement& m = r.scan.at(i);
    if (!m.valid || m.target_index != 0) continue;
    const Vec2 xy = r.geom.world_position(r.scan, r.scan.position_at(i), m);
    if (xy.x() > 11.0) {
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kGround);
      ++ramp_points;
    }
  }
  CHECK(ramp_points > 500);
}

TEST_CASE("height grid median rejects a single outlier") {
  // Hand-built scan: 3x3 cells of planar candidates, plus one outlier 1 m up.
  SensorConfig cfg = sensor_profile_16();
  SphericalScan scan(cfg, 0, 0.0);
  scan.ego_track().add(0.0, {{0.0, 0.0}, 0.0});
  GroundParams params;

  int slot = 0;
  auto add_point = [&](double x, double y, double z_sensor) {
    const double d = std::hypot(x, y);
    const double az = wrap_deg_360(rad_to_deg(std::atan2(y, x)));
    const double el = rad_to_deg(std::atan2(z_sensor, d));
    Measurement m;
    m.range = std::hypot(d, z_sensor);
    m.azimuth_deg = az;
    m.elevation_deg = el;
    m.valid = true;
    const LogicalPosition p{slot / cfg.n_channels, slot % cfg.n_channels, 0};
    ++slot;
    REQUIRE(scan.insert(p, m));
    scan.attributes(p).set(AttributeSet::kGroundCandidate);
  };

  // 5 candidates per cell in a 3x3 block near (10, 10); plane at z = -2
  for (int cx = 0; cx < 3; ++cx)
    for (int cy = 0; cy < 3; ++cy)
      for (int k = 0; k < 5; ++k)
        add_point(10.0 + 0.5 * cx + 0.1 * k, 10.0 + 0.5 * cy + 0.07 * k, -2.0);
  add_point(10.25, 10.25, -1.0);  // outlier inside the first cell

  const ChannelGeometry geom = ChannelGeometry::build(scan);  // after insertion
  HeightGrid grid = build_height_grid(scan, geom, params);
  const auto h = grid.height_at({10.25, 10.25});
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("region fill fills holes and leaves supported cells alone") {
  GroundParams params;
  HeightGrid grid({0.0, 0.0}, 5.0, 0.5);

  // ring of supported cells; 10x10 interior hole
  const int n = grid.size();
  auto idx = [n](int x, int y) { return y * n + x; };
  for (int x = 4; x < 16; ++x)
    for (int y = 4; y < 16; ++y)
      if (x == 4 || x == 15 || y == 4 || y == 15) grid.set_supported(idx(x, y), -2.0, 3);

  // fixpoint oracle: iterate by hand on a copy
  struct Cell {
    double h{0.0};
    bool resolved{false};
    bool support{false};
  };
  std::vector<Cell> oracle(n * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (grid.supported(idx(x, y))) oracle[idx(x, y)] = {-2.0, true, true};
  for (int iter = 0; iter < params.fill_iterations; ++iter) {
    std::vector<std::pair<int, double>> fills;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (oracle[idx(x, y)].resolved) continue;
        int count = 0;
        double sum = 0.0;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy) {
            if (dx == 0 && dy == 0) continue;
            const int jx = x + dx, jy = y + dy;
            if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
            if (oracle[idx(jx, jy)].resolved) {
              sum += oracle[idx(jx, jy)].h;
              ++count;
            }
          }
        if (count >= 3) fills.emplace_back(idx(x, y), sum / count);
      }
    }
    if (fills.empty()) break;
    for (auto& [i, h] : fills) oracle[i] = {h, true, false};
  }

  region_fill(grid, params);
  for (int i = 0; i < n * n; ++i) {
    CHECK(grid.resolved(i) == oracle[i].resolved);
    if (oracle[i].resolved) CHECK(grid.height(i) == doctest::Approx(oracle[i].h).epsilon(1e-12));
    if (oracle[i].support) {
      CHECK(grid.supported(i));
      CHECK(grid.height(i) == doctest::Approx(-2.0));
    }
  }
  // interior of the ring is filled to the plane height
  CHECK(grid.resolved(idx(9, 9)));
  CHECK(grid.height(idx(9, 9)) == doctest::Approx(-2.0).epsilon(1e-12));

  // a cell with only 2 resolved neighbors stays unfilled in one iteration
  HeightGrid g2({0.0, 0.0}, 2.0, 0.5);
  g2.set_supported(0, -2.0, 1);
  g2.set_supported(1, -2.0, 1);
  GroundParams one_iter;
  one_iter.fill_iterations = 1;
  region_fill(g2, one_iter);
  int resolved = 0;
  for (int i = 0; i < g2.size() * g2.size(); ++i) resolved += g2.resolved(i) ? 1 : 0;
  CHECK(resolved == 2);
}

TEST_CASE("box roof is elevated, overhanging beam keeps ground below it") {
  Scene scene = flat_scene();
  StaticBox box;
  box.footprint = {{8.0, 2.0}, 0.0, 3.0, 2.0};
  box.height = 1.5;
  scene.static_boxes.push_back(box);
  // Overhang 4 m up far enough out that the upward-looking layers reach it
  // (max elevation +3 deg from a 2 m mount).
  StaticBox beam;
  beam.footprint = {{40.0, 0.0}, 0.0, 12.0, 4.0};
  beam.z_offset = 4.0;
  beam.height = 0.5;
  scene.static_boxes.push_back(beam);

  const Prepared r = run_stage(scene);
  int roof_or_wall = 0, beam_points = 0, under_beam_ground = 0;
  for (size_t i = 0; i < r.scan.cell_count(); ++i) {
    const Measurement& m = r.scan.at(i);
    if (!m.valid) continue;
    const Vec2 xy = r.geom.world_position(r.scan, r.scan.position_at(i), m);
    const double z = r.scan.sensor_relative_z(m) + 2.0;
    const bool in_box = std::abs(xy.x() - 8.0) < 1.4 && std::abs(xy.y() - 2.0) < 0.9;
    const bool in_beam = std::abs(xy.x() - 40.0) < 5.9 && std::abs(xy.y()) < 1.9;
    if (in_box && z > 0.5) {
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kElevated);
      ++roof_or_wall;
    }
    if (in_beam && z > 3.5) {
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kElevated);
      ++beam_points;
    }
    if (in_beam && z < 0.2) {
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kGround);
      ++under_beam_ground;
    }
  }
  CHECK(roof_or_wall > 20);
  CHECK(beam_points > 5);
  CHECK(under_beam_ground > 5);
}

TEST_CASE("curb step is flagged, plane and wall base are not") {
  GroundParams params;

  SUBCASE("flat plane has zero curb flags") {
    const Prepared r = run_stage(flat_scene(), params);
    int curbs = 0;
    for (size_t i = 0; i < r.scan.cell_count(); ++i)
      if (r.scan.attributes(i).has(AttributeSet::kCurb)) ++curbs;
    CHECK(curbs == 0);
  }

  SUBCASE("0.15 m step parallel to travel is flagged") {
    Scene scene = flat_scene();
    scene.ground.clear();
    GroundPatch street;
    street.y_max = 5.0;
    scene.ground.push_back(street);
    GroundPatch sidewalk;
    sidewalk.y_min = 5.0;
    sidewalk.z0 = 0.15;
    scene.ground.push_back(sidewalk);

    const Prepared r = run_stage(scene, params);
    int curb_near_step = 0, curb_far_from_step = 0;
    for (size_t i = 0; i < r.scan.cell_count(); ++i) {
      if (!r.scan.attributes(i).has(AttributeSet::kCurb)) continue;
      const Measurement& m = r.scan.at(i);
      const Vec2 xy = r.geom.world_position(r.scan, r.scan.position_at(i), m);
      if (std::abs(xy.y() - 5.0) < 1.0) ++curb_near_step;
      else ++curb_far_from_step;
    }
    CHECK(curb_near_step > 10);
    CHECK(curb_far_from_step == 0);
  }

  SUBCASE("0.5 m wall base is not curb") {
    Scene scene = flat_scene();
    StaticBox barrier;
    barrier.footprint = {{0.0, 8.0}, 0.0, 30.0, 0.6};
    barrier.height = 0.5;
    scene.static_boxes.push_back(barrier);

    const Prepared r = run_stage(scene, params);
    for (size_t i = 0; i < r.scan.cell_count(); ++i)
      CHECK_FALSE(r.scan.attributes(i).has(AttributeSet::kCurb));
  }
}

TEST_CASE("classification is total and exclusive over populated cells") {
  Scene scene = flat_scene();
  StaticBox box;
  box.footprint = {{9.0, -4.0}, 0.4, 4.0, 2.0};
  box.height = 1.6;
  scene.static_boxes.push_back(box);
  const Prepared r = run_stage(scene);
  for (size_t i = 0; i < r.scan.cell_count(); ++i) {
    const Measurement& m = r.scan.at(i);
    if (!m.valid) {
      CHECK(r.scan.attributes(i).ground_class == GroundClass::kUnknown);
      continue;
    }
    CHECK(r.scan.attributes(i).ground_class != GroundClass::kUnknown);
  }
}

TEST_CASE("raising dz_ground never shrinks the ground set") {
  Scene scene = flat_scene();
  StaticBox box;
  box.footprint = {{9.0, -4.0}, 0.4, 4.0, 2.0};
  box.height = 1.6;
  scene.static_boxes.push_back(box);

  GroundParams tight;
  tight.dz_ground_m = 0.10;
  GroundParams loose;
  loose.dz_ground_m = 0.25;
  const Prepared a = run_stage(scene, tight);
  const Prepared b = run_stage(scene, loose);
  for (size_t i = 0; i < a.scan.cell_count(); ++i) {
    if (a.scan.attributes(i).ground_class == GroundClass::kGround)
      CHECK(b.scan.attributes(i).ground_class == GroundClass::kGround);
  }
}

TEST_CASE("height grid csv dump lists resolved cells") {
  const Prepared r = run_stage(flat_scene());
  std::ostringstream os;
  r.grid.dump_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("x,y,height,support,filled", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') > 100);
}
