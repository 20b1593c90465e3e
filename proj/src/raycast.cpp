#include "percept/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace percept {

namespace {

struct Hit {
  double range;
  int surface;  // 0..n_ground-1 ground patches, then boxes, then actors
  double intensity;
  bool ground;
  bool center;  // hit by the central sub-ray
  Vec2 world_xy;
};

struct BoxObstacle {
  Vec2 center;
  double yaw;
  double half_len;
  double half_wid;
  double z_bottom;
  double z_top;
  double intensity;
  int surface;
};

// Ray vs oriented box, slab method in the box frame. Returns entry distance.
bool intersect_box(const Vec2& origin_xy, double origin_z, const Vec2& dir_xy, double dir_z,
                   const BoxObstacle& box, double max_range, double& range_out) {
  const Eigen::Matrix2d rot = rotation2d(-box.yaw);
  const Vec2 o = rot * (origin_xy - box.center);
  const Vec2 d = rot * dir_xy;
  double t_min = 0.0, t_max = max_range;
  const double lo[3] = {-box.half_len, -box.half_wid, box.z_bottom};
  const double hi[3] = {box.half_len, box.half_wid, box.z_top};
  const double os[3] = {o.x(), o.y(), origin_z};
  const double ds[3] = {d.x(), d.y(), dir_z};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ds[k]) < 1e-12) {
      if (os[k] < lo[k] || os[k] > hi[k]) return false;
      continue;
    }
    double t0 = (lo[k] - os[k]) / ds[k];
    double t1 = (hi[k] - os[k]) / ds[k];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  if (t_min <= 0.0 || t_min > max_range) return false;
  range_out = t_min;
  return true;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

SimulatedScan raycast_scan(const Scene& scene, const SensorConfig& sensor, int64_t scan_index,
                           const RaycastOptions& options) {
  scene.validate();
  sensor.validate();
  const double t_start = scan_index * sensor.rotation_period_s;
  SphericalScan scan(sensor, scan_index, t_start);

  // Pose track sampled densely enough for linear interpolation of turns.
  const int pose_samples = 10;
  for (int i = 0; i <= pose_samples; ++i) {
    const double t = t_start + sensor.rotation_period_s * i / pose_samples;
    scan.ego_track().add(t, scene.ego_trajectory.pose_at(t));
  }

  std::mt19937_64 rng(splitmix64(options.seed * 0x51ab5e1ull + static_cast<uint64_t>(scan_index)));
  std::normal_distribution<double> noise(0.0, 1.0);

  // Obstacles frozen per firing time for actors; boxes are static. Candidate
  // lists per channel use scan-start geometry padded for motion.
  const Pose2 ego0 = scene.ego_trajectory.pose_at(t_start);
  const int n_ground = static_cast<int>(scene.ground.size());
  std::vector<BoxObstacle> static_obs;
  static_obs.reserve(scene.static_boxes.size());
  for (size_t i = 0; i < scene.static_boxes.size(); ++i) {
    const StaticBox& b = scene.static_boxes[i];
    BoxObstacle o;
    o.center = b.footprint.center;
    o.yaw = b.footprint.yaw;
    o.half_len = 0.5 * b.footprint.length;
    o.half_wid = 0.5 * b.footprint.width;
    const double g = scene.ground_height(o.center.x(), o.center.y());
    o.z_bottom = g + b.z_offset;
    o.z_top = o.z_bottom + b.height;
    o.intensity = b.intensity;
    o.surface = n_ground + static_cast<int>(i);
    static_obs.push_back(o);
  }

  std::vector<const Actor*> live_actors;
  for (const Actor& a : scene.actors)
    if (a.alive_at(t_start) || a.alive_at(t_start + sensor.rotation_period_s))
      live_actors.push_back(&a);

  // Channel buckets of candidate obstacle indices (static first, then actors).
  const int n_static = static_cast<int>(static_obs.size());
  const int n_candidates = n_static + static_cast<int>(live_actors.size());
  std::vector<std::vector<int>> buckets(sensor.n_channels);
  auto add_interval = [&](int idx, const Vec2& center, double radius) {
    const Vec2 rel = center - ego0.position;
    const double dist = rel.norm();
    if (dist <= radius + 1.0) {
      for (auto& b : buckets) b.push_back(idx);
      return;
    }
    const double center_deg = wrap_deg_360(rad_to_deg(std::atan2(rel.y(), rel.x()) - ego0.yaw));
    const double half_deg = rad_to_deg(std::asin(std::min(1.0, radius / dist)));
    const int c0 = static_cast<int>(std::floor((center_deg - half_deg) / sensor.azimuth_step_deg));
    const int c1 = static_cast<int>(std::ceil((center_deg + half_deg) / sensor.azimuth_step_deg));
    for (int c = c0; c <= c1; ++c) {
      int cc = c % sensor.n_channels;
      if (cc < 0) cc += sensor.n_channels;
      buckets[cc].push_back(idx);
    }
  };
  const double ego_motion_pad =
      scene.ego_trajectory.speed_at(t_start) * sensor.rotation_period_s + 0.5;
  for (int i = 0; i < n_static; ++i) {
    const BoxObstacle& o = static_obs[i];
    add_interval(i, o.center, std::hypot(o.half_len, o.half_wid) + ego_motion_pad);
  }
  for (size_t i = 0; i < live_actors.size(); ++i) {
    const Actor& a = *live_actors[i];
    const Pose2 p = a.trajectory.pose_at(t_start);
    const double pad =
        ego_motion_pad + a.trajectory.speed_at(t_start) * sensor.rotation_period_s + 0.5;
    add_interval(n_static + static_cast<int>(i), p.position, 0.5 * std::hypot(a.length, a.width) + pad);
  }

  const double half_step_rad = 0.5 * deg_to_rad(sensor.azimuth_step_deg);
  std::vector<Hit> hits;
  std::vector<BoxObstacle> actor_obs(live_actors.size());

  for (int channel = 0; channel < sensor.n_channels; ++channel) {
    const double t_offset = sensor.timestamp_of(channel);
    const Pose2 ego = scan.ego_pose_at(t_offset);
    const double origin_z =
        scene.ground_height(ego.position.x(), ego.position.y()) + sensor.mount_height_m;
    const double azimuth_deg = (channel + 0.5) * sensor.azimuth_step_deg;

    // Freeze actor boxes at this firing time.
    for (size_t i = 0; i < live_actors.size(); ++i) {
      const Actor& a = *live_actors[i];
      BoxObstacle& o = actor_obs[i];
      if (!a.alive_at(t_start + t_offset)) {
        o.z_top = -1e9;  // disabled
        o.z_bottom = 0.0;
        continue;
      }
      const Pose2 p = a.trajectory.pose_at(t_start + t_offset);
      o.center = p.position;
      o.yaw = p.yaw;
      o.half_len = 0.5 * a.length;
      o.half_wid = 0.5 * a.width;
      const double g = scene.ground_height(p.position.x(), p.position.y());
      o.z_bottom = g;
      o.z_top = g + a.height;
      o.intensity = a.intensity;
      o.surface = n_ground + n_static + static_cast<int>(i);
    }

    for (int layer = 0; layer < sensor.n_layers; ++layer) {
      const double elev_rad = deg_to_rad(sensor.elevation_deg[layer]);
      const double cos_e = std::cos(elev_rad);
      const double sin_e = std::sin(elev_rad);
      hits.clear();

      const double base_az = ego.yaw + deg_to_rad(azimuth_deg);
      for (int sub = -1; sub <= 1; ++sub) {
        const bool center = sub == 0;
        const double az = base_az + sub * half_step_rad;
        const Vec2 dir_xy(cos_e * std::cos(az), cos_e * std::sin(az));
        const double dir_z = sin_e;

        // Ground patches: linear solve per patch, validated against the
        // composite height field (later patches override earlier ones).
        for (int gi = 0; gi < n_ground; ++gi) {
          const GroundPatch& p = scene.ground[gi];
          const double denom = dir_z - p.slope_x * dir_xy.x() - p.slope_y * dir_xy.y();
          if (std::abs(denom) < 1e-12) continue;
          const double z_at_origin =
              p.z0 + p.slope_x * (ego.position.x() - p.x0) + p.slope_y * (ego.position.y() - p.y0);
          const double s = (z_at_origin - origin_z) / denom;
          if (s < options.min_range || s > sensor.max_range_m) continue;
          const Vec2 xy = ego.position + s * dir_xy;
          if (!p.contains(xy.x(), xy.y())) continue;
          const double z = origin_z + s * dir_z;
          if (std::abs(scene.ground_height(xy.x(), xy.y()) - z) > 1e-6) continue;  // overridden
          hits.push_back({s, gi, scene.ground_intensity, true, center, xy});
        }

        for (int idx : buckets[channel]) {
          const BoxObstacle& o = idx < n_static ? static_obs[idx] : actor_obs[idx - n_static];
          if (o.z_top <= o.z_bottom) continue;
          double r;
          if (intersect_box(ego.position, origin_z, dir_xy, dir_z, o, sensor.max_range_m, r))
            hits.push_back({r, o.surface, o.intensity, false, center, ego.position + r * dir_xy});
        }
        (void)n_candidates;
      }

      if (hits.empty()) continue;
      // Per surface keep one hit, preferring the central sub-ray (the stored
      // azimuth is the channel center); order surfaces by range.
      std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.surface != b.surface) return a.surface < b.surface;
        if (a.center != b.center) return a.center;
        return a.range < b.range;
      });
      std::vector<Hit> per_surface;
      for (const Hit& h : hits)
        if (per_surface.empty() || per_surface.back().surface != h.surface) per_surface.push_back(h);
      std::sort(per_surface.begin(), per_surface.end(),
                [](const Hit& a, const Hit& b) { return a.range < b.range; });

      // The first return needs a central-ray hit; side rays widen the beam
      // footprint and only trigger additional echoes at silhouette edges.
      while (!per_surface.empty() && !per_surface.front().center)
        per_surface.erase(per_surface.begin());
      if (per_surface.empty()) continue;

      int emitted = 0;
      double first_range = 0.0;
      for (const Hit& h : per_surface) {
        if (emitted >= sensor.n_slices) break;
        if (emitted > 0 && h.range - first_range < options.echo_separation) continue;
        double range = h.range;
        if (options.range_noise_sigma > 0.0) range += options.range_noise_sigma * noise(rng);
        if (range < options.min_range || range > sensor.max_range_m) continue;

        double intensity = h.intensity;
        if (h.ground) {
          for (const Lane& lane : scene.lanes) {
            if (lane.centerline.size() < 2) continue;
            const PolylineProjection proj = project_to_polyline(lane.centerline, h.world_xy);
            if (std::abs(std::abs(proj.lateral) - 0.5 * lane.width) <= scene.marking_half_width) {
              intensity = scene.marking_intensity;
              break;
            }
          }
        }

        Measurement m;
        m.range = range;
        m.azimuth_deg = azimuth_deg;
        m.elevation_deg = sensor.elevation_deg[layer];
        m.intensity = intensity;
        m.t_offset = t_offset;
        m.target_index = static_cast<uint8_t>(emitted);
        m.valid = true;
        scan.insert({layer, channel, emitted}, m);
        if (emitted == 0) first_range = h.range;
        ++emitted;
      }
    }
  }

  GroundTruthFrame truth;
  truth.scan_index = scan_index;
  truth.t = t_start + sensor.rotation_period_s;
  truth.ego_pose = scene.ego_trajectory.pose_at(truth.t);
  truth.ego_velocity = scene.ego_trajectory.velocity_at(truth.t);
  for (const Actor& a : scene.actors) {
    if (!a.alive_at(truth.t)) continue;
    const Pose2 p = a.trajectory.pose_at(truth.t);
    if ((p.position - truth.ego_pose.position).norm() > sensor.max_range_m) continue;
    TruthObject o;
    o.id = a.id;
    o.position = p.position;
    o.yaw = p.yaw;
    o.length = a.length;
    o.width = a.width;
    o.height = a.height;
    o.velocity = a.trajectory.velocity_at(truth.t);
    truth.objects.push_back(o);
  }
  return {std::move(scan), truth};
}

Recording simulate(const Scene& scene, const SensorConfig& sensor, int n_scans,
                   const RaycastOptions& options) {
  Recording rec;
  rec.truth.lanes = scene.lanes;
  rec.scans.reserve(n_scans);
  for (int i = 0; i < n_scans; ++i) {
    SimulatedScan s = raycast_scan(scene, sensor, i, options);
    rec.scans.push_back(std::move(s.scan));
    rec.truth.frames.push_back(s.truth);
  }
  return rec;
}

}  // namespace percept
