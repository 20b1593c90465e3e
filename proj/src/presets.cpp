#include "percept/presets.hpp"

#include "percept/errors.hpp"

namespace percept {

namespace {

Lane straight_lane(int id, double y, double x0, double x1, double width = 3.5) {
  Lane lane;
  lane.id = id;
  lane.width = width;
  lane.centerline = {{x0, y}, {x1, y}};
  return lane;
}

Actor straight_car(int id, double x, double y, double speed, double heading = 0.0) {
  Actor a;
  a.id = id;
  a.trajectory = Trajectory({{x, y}, heading}, {{1e4, speed, 0.0}});
  return a;
}

Scene three_lane_road() {
  Scene scene;
  scene.ground.push_back({});
  scene.lanes = {straight_lane(1, 0.0, -60.0, 900.0), straight_lane(2, 3.5, -60.0, 900.0),
                 straight_lane(3, -3.5, -60.0, 900.0)};
  return scene;
}

Preset acc_follow() {
  Preset p;
  p.name = "acc_follow";
  p.scenario = Scenario::kAcc;
  p.default_scans = 600;
  p.scene = three_lane_road();
  p.scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e4, 10.0, 0.0}});

  p.scene.actors.push_back(straight_car(1, 16.0, 0.0, 10.2));
  p.scene.actors.push_back(straight_car(2, 34.0, 0.0, 10.05));
  p.scene.actors.push_back(straight_car(3, 12.0, 3.5, 10.3));
  p.scene.actors.push_back(straight_car(4, -14.0, 3.5, 10.4));
  p.scene.actors.push_back(straight_car(5, 20.0, -3.5, 9.9));
  p.scene.actors.push_back(straight_car(6, -8.0, -3.5, 10.2));
  p.scene.actors.push_back(straight_car(7, 30.0, 3.5, 9.95));
  p.scene.actors.push_back(straight_car(8, 38.0, -3.5, 10.1));
  return p;
}

Preset lane_change_dense() {
  Preset p;
  p.name = "lane_change_dense";
  p.scenario = Scenario::kLaneChange;
  p.default_scans = 600;
  p.scene = three_lane_road();
  p.scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e4, 10.0, 0.0}});

  // ego-lane truck whose shadow scripts the occlusion of the left-lane car 3
  Actor truck = straight_car(1, 14.0, 0.0, 10.0);
  truck.length = 8.0;
  truck.width = 2.2;
  truck.height = 2.6;
  p.scene.actors.push_back(truck);

  p.scene.actors.push_back(straight_car(2, 10.0, 3.5, 10.0));
  p.scene.actors.push_back(straight_car(3, 26.0, 3.5, 10.45));  // drifts into the shadow

  Actor truck_r = straight_car(4, 13.0, -3.5, 10.0);
  truck_r.length = 7.0;
  truck_r.width = 2.5;
  truck_r.height = 2.5;
  p.scene.actors.push_back(truck_r);
  p.scene.actors.push_back(straight_car(5, 30.0, -3.5, 10.45));  // second scripted occlusion

  p.scene.actors.push_back(straight_car(6, -12.0, 0.0, 10.0));
  p.scene.actors.push_back(straight_car(7, -15.0, 3.5, 10.15));
  p.scene.actors.push_back(straight_car(8, -18.0, -3.5, 10.1));
  return p;
}

Preset left_turn_oncoming() {
  Preset p;
  p.name = "left_turn_oncoming";
  p.scenario = Scenario::kLeftTurn;
  p.default_scans = 300;
  p.scene.ground.push_back({});
  p.scene.lanes = {straight_lane(1, 0.0, -60.0, 300.0)};
  Lane oncoming;
  oncoming.id = 2;
  oncoming.width = 3.5;
  oncoming.centerline = {{300.0, 3.5}, {-60.0, 3.5}};
  p.scene.lanes.push_back(oncoming);

  // ego holds at the intersection
  p.scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e4, 0.0, 0.0}});

  // stopped lead partially occluding the oncoming lane (kept out of it)
  Actor lead = straight_car(1, 10.0, 0.8, 0.0);
  lead.height = 1.5;
  p.scene.actors.push_back(lead);

  for (int i = 0; i < 5; ++i) {
    Actor car = straight_car(10 + i, 140.0, 3.5, 14.0, kPi);
    car.spawn_time = 3.0 + 5.5 * i;
    // let each car start its approach at spawn time from x = 140
    car.trajectory = Trajectory({{140.0 + 14.0 * car.spawn_time, 3.5}, kPi}, {{1e4, 14.0, 0.0}});
    p.scene.actors.push_back(car);
  }
  return p;
}

Preset beacon_lane() {
  Preset p;
  p.name = "beacon_lane";
  p.scenario = Scenario::kAcc;
  p.default_scans = 100;
  p.scene.ground.push_back({});
  p.scene.lanes = {straight_lane(1, 0.0, -30.0, 300.0)};
  p.scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e4, 3.0, 0.0}});
  for (int i = 0; i < 14; ++i) {
    StaticBox beacon;
    beacon.footprint = {{8.0 + 5.0 * i, -3.2}, 0.0, 0.4, 0.4};
    beacon.height = 1.0;
    beacon.intensity = 0.6;
    p.scene.static_boxes.push_back(beacon);
  }
  p.scene.actors.push_back(straight_car(1, 18.0, 0.0, 3.2));
  return p;
}

Preset overhang_street() {
  Preset p;
  p.name = "overhang_street";
  p.scenario = Scenario::kAcc;
  p.default_scans = 150;
  p.scene = three_lane_road();
  p.scene.ego_trajectory = Trajectory({{0.0, 0.0}, 0.0}, {{1e4, 8.0, 0.0}});

  StaticBox gantry;  // spans the road, underrunable
  gantry.footprint = {{45.0, 0.0}, 0.0, 2.0, 24.0};
  gantry.z_offset = 4.5;
  gantry.height = 0.8;
  p.scene.static_boxes.push_back(gantry);

  for (int i = 0; i < 5; ++i) {
    StaticBox parked;
    parked.footprint = {{15.0 + 12.0 * i, -6.5}, 0.0, 4.5, 1.8};
    parked.height = 1.5;
    p.scene.static_boxes.push_back(parked);
  }
  p.scene.actors.push_back(straight_car(1, 20.0, 0.0, 8.3));
  p.scene.actors.push_back(straight_car(2, 12.0, 3.5, 8.6));
  return p;
}

Preset urban() {
  Preset p;
  p.name = "urban";
  p.scenario = Scenario::kAcc;
  p.default_scans = 20;
  p.sensor_profile = "64";
  p.scene.ground.push_back({});
  p.scene.lanes = {straight_lane(1, -1.75, -80.0, 600.0), straight_lane(2, 1.75, -80.0, 600.0),
                   straight_lane(3, -5.25, -80.0, 600.0), straight_lane(4, 5.25, -80.0, 600.0)};
  p.scene.ego_trajectory = Trajectory({{0.0, -1.75}, 0.0}, {{1e4, 10.0, 0.0}});

  // building fronts lining the street, with door gaps
  for (int i = 0; i < 20; ++i) {
    for (double side : {-12.0, 12.0}) {
      StaticBox wall;
      wall.footprint = {{-60.0 + 32.0 * i + (side < 0 ? 0.0 : 14.0), side}, 0.0, 26.0, 2.0};
      wall.height = 8.0;
      wall.intensity = 0.4;
      p.scene.static_boxes.push_back(wall);
    }
  }
  // trees: trunk plus canopy
  for (int i = 0; i < 16; ++i) {
    for (double side : {-9.0, 9.0}) {
      const double x = -50.0 + 22.0 * i + (side < 0 ? 0.0 : 9.0);
      StaticBox trunk;
      trunk.footprint = {{x, side}, 0.0, 0.5, 0.5};
      trunk.height = 2.6;
      p.scene.static_boxes.push_back(trunk);
      StaticBox canopy;
      canopy.footprint = {{x, side}, 0.0, 4.5, 4.5};
      canopy.z_offset = 2.6;
      canopy.height = 2.2;
      p.scene.static_boxes.push_back(canopy);
    }
  }
  // parked cars near the curbs
  for (int i = 0; i < 12; ++i) {
    StaticBox parked;
    parked.footprint = {{-40.0 + 14.0 * i, i % 2 == 0 ? -7.6 : 7.6}, 0.0, 4.5, 1.8};
    parked.height = 1.5;
    p.scene.static_boxes.push_back(parked);
  }

  // 22 moving actors spread over the four lanes
  int id = 1;
  for (int i = 0; i < 6; ++i)
    p.scene.actors.push_back(straight_car(id++, -45.0 + 18.0 * i, -1.75, 9.0 + 0.4 * i));
  for (int i = 0; i < 6; ++i)
    p.scene.actors.push_back(straight_car(id++, -52.0 + 19.0 * i, -5.25, 8.0 + 0.5 * i));
  for (int i = 0; i < 5; ++i)
    p.scene.actors.push_back(straight_car(id++, 70.0 - 21.0 * i, 1.75, 11.0 - 0.4 * i, kPi));
  for (int i = 0; i < 5; ++i)
    p.scene.actors.push_back(straight_car(id++, 78.0 - 23.0 * i, 5.25, 12.0 - 0.5 * i, kPi));
  return p;
}

}  // namespace

Preset build_preset(const std::string& name) {
  if (name == "acc_follow") return acc_follow();
  if (name == "lane_change_dense") return lane_change_dense();
  if (name == "left_turn_oncoming") return left_turn_oncoming();
  if (name == "beacon_lane") return beacon_lane();
  if (name == "overhang_street") return overhang_street();
  if (name == "urban") return urban();
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"acc_follow",  "lane_change_dense", "left_turn_oncoming",
          "beacon_lane", "overhang_street",   "urban"};
}

}  // namespace percept
