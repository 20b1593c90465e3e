#include "percept/motion.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace percept {

void MotionParams::validate() const {
  if (cell_size_m <= 0.0) throw ValidationError("motion: cell size must be positive");
  if (confirm_hits < 1 || free_hits < 1)
    throw ValidationError("motion: streak thresholds must be >= 1");
  if (window_m <= 0.0) throw ValidationError("motion: window must be positive");
}

void ConsistencyGrid::configure(const MotionParams& params, double max_range_m) {
  params.validate();
  params_ = params;
  const double window = std::max(params.window_m, 2.0 * max_range_m + 4.0 * params.cell_size_m);
  n_ = static_cast<int>(std::ceil(window / params.cell_size_m));
  cells_.assign(static_cast<size_t>(n_) * n_, Cell{});
  touched_.clear();
  scan_index_ = -1;
}

ConsistencyGrid::Cell& ConsistencyGrid::slot(int32_t cx, int32_t cy) {
  int ix = cx % n_;
  if (ix < 0) ix += n_;
  int iy = cy % n_;
  if (iy < 0) iy += n_;
  return cells_[static_cast<size_t>(iy) * n_ + ix];
}

const ConsistencyGrid::Cell* ConsistencyGrid::slot_if_owner(int32_t cx, int32_t cy) const {
  int ix = cx % n_;
  if (ix < 0) ix += n_;
  int iy = cy % n_;
  if (iy < 0) iy += n_;
  const Cell& c = cells_[static_cast<size_t>(iy) * n_ + ix];
  if (c.owner_x != cx || c.owner_y != cy) return nullptr;
  return &c;
}

ConsistencyGrid::Cell& ConsistencyGrid::observed(int32_t cx, int32_t cy) {
  Cell& c = slot(cx, cy);
  if (c.owner_x != cx || c.owner_y != cy) {
    c = Cell{};  // slot left the window; reset to unknown
    c.owner_x = cx;
    c.owner_y = cy;
  }
  if (c.obs == 0) touched_.push_back(static_cast<uint32_t>(&c - cells_.data()));
  return c;
}

void ConsistencyGrid::update(const SphericalScan& scan, const ChannelGeometry& geom,
                             const HeightGrid& ground) {
  const SensorConfig& cfg = scan.config();
  scan_index_ = scan.scan_index();
  const double cell = params_.cell_size_m;
  touched_.clear();

  for (int channel = 0; channel < cfg.n_channels; ++channel) {
    const Pose2& ego = geom.poses[channel];
    double free_until = 0.0;
    double block_at = 1e30;
    struct Endpoint {
      double d;
      Vec2 xy;
      bool elevated;
    };
    std::vector<Endpoint> endpoints;
    endpoints.reserve(cfg.n_layers);

    for (int layer = 0; layer < cfg.n_layers; ++layer) {
      const LogicalPosition p{layer, channel, 0};
      const Measurement& m = scan.at(p);
      if (!m.valid) continue;
      const double d = scan.horizontal_distance(m);
      const Vec2 xy = geom.world_position(scan, p, m);
      const bool elevated = scan.attributes(p).ground_class == GroundClass::kElevated;
      endpoints.push_back({d, xy, elevated});
      if (elevated) {
        const auto h = ground.height_at(xy);
        const double z_rel = scan.sensor_relative_z(m) - (h ? *h : -cfg.mount_height_m);
        if (z_rel <= params_.block_clearance_m) block_at = std::min(block_at, d);
      }
      free_until = std::max(free_until, d);
    }
    if (endpoints.empty()) continue;
    free_until = std::min(free_until, block_at);

    // Free trace up to the nearest blocking endpoint (2D DDA).
    if (free_until > cell) {
      const double az = ego.yaw + deg_to_rad((channel + 0.5) * cfg.azimuth_step_deg);
      const Vec2 dir(std::cos(az), std::sin(az));
      const Vec2 end = ego.position + (free_until - 0.5 * cell) * dir;
      int32_t cx = static_cast<int32_t>(std::floor(ego.position.x() / cell));
      int32_t cy = static_cast<int32_t>(std::floor(ego.position.y() / cell));
      const int32_t ex = static_cast<int32_t>(std::floor(end.x() / cell));
      const int32_t ey = static_cast<int32_t>(std::floor(end.y() / cell));
      const int sx = dir.x() > 0 ? 1 : -1;
      const int sy = dir.y() > 0 ? 1 : -1;
      const double tdx = std::abs(dir.x()) > 1e-12 ? cell / std::abs(dir.x()) : 1e30;
      const double tdy = std::abs(dir.y()) > 1e-12 ? cell / std::abs(dir.y()) : 1e30;
      double tmx = std::abs(dir.x()) > 1e-12
                       ? ((sx > 0 ? (cx + 1) * cell - ego.position.x() : ego.position.x() - cx * cell) /
                          std::abs(dir.x()))
                       : 1e30;
      double tmy = std::abs(dir.y()) > 1e-12
                       ? ((sy > 0 ? (cy + 1) * cell - ego.position.y() : ego.position.y() - cy * cell) /
                          std::abs(dir.y()))
                       : 1e30;
      int guard = 4 * n_;
      while (guard-- > 0) {
        observed(cx, cy).obs |= 1;
        if (cx == ex && cy == ey) break;
        if (tmx < tmy) {
          cx += sx;
          tmx += tdx;
        } else {
          cy += sy;
          tmy += tdy;
        }
      }
    }

    for (const Endpoint& e : endpoints) {
      const int32_t cx = static_cast<int32_t>(std::floor(e.xy.x() / cell));
      const int32_t cy = static_cast<int32_t>(std::floor(e.xy.y() / cell));
      if (e.elevated) {
        observed(cx, cy).obs |= 2;
      } else if (e.d > free_until) {
        observed(cx, cy).obs |= 1;  // ground seen beyond the blocker
      }
    }
  }

  // FSM pass over observed cells; a hit outweighs a free in the same scan.
  for (const uint32_t idx : touched_) {
    Cell& c = cells_[idx];
    const bool hit = (c.obs & 2) != 0;
    c.obs = 0;
    if (hit) {
      c.free_streak = 0;
      switch (c.state) {
        case CellState::kUnknown:
          c.state = CellState::kOccupiedNew;
          c.hit_streak = 1;
          c.transition_scan = scan_index_;
          break;
        case CellState::kFree:
          c.state = CellState::kOccupiedAfterFree;
          c.hit_streak = 1;
          c.transition_scan = scan_index_;
          break;
        case CellState::kOccupiedNew:
          if (c.hit_streak < 255) ++c.hit_streak;
          if (c.hit_streak >= params_.confirm_hits) {
            c.state = CellState::kOccupiedStatic;
            c.transition_scan = scan_index_;
          }
          break;
        case CellState::kOccupiedStatic:
        case CellState::kOccupiedAfterFree:
          if (c.hit_streak < 255) ++c.hit_streak;
          break;
      }
    } else {
      c.hit_streak = 0;
      if (c.free_streak < 255) ++c.free_streak;
      switch (c.state) {
        case CellState::kUnknown:
          c.state = CellState::kFree;
          c.transition_scan = scan_index_;
          break;
        case CellState::kFree:
          break;
        default:  // any occupied state frees after enough consecutive misses
          if (c.free_streak >= params_.free_hits) {
            c.state = CellState::kFree;
            c.transition_scan = scan_index_;
          }
          break;
      }
    }
  }
}

CellState ConsistencyGrid::state_at(const Vec2& world) const {
  const double cell = params_.cell_size_m;
  const Cell* c = slot_if_owner(static_cast<int32_t>(std::floor(world.x() / cell)),
                                static_cast<int32_t>(std::floor(world.y() / cell)));
  return c ? c->state : CellState::kUnknown;
}

int64_t ConsistencyGrid::last_transition_scan(const Vec2& world) const {
  const double cell = params_.cell_size_m;
  const Cell* c = slot_if_owner(static_cast<int32_t>(std::floor(world.x() / cell)),
                                static_cast<int32_t>(std::floor(world.y() / cell)));
  return c ? c->transition_scan : -1;
}

MotionClass ConsistencyGrid::classify(CellState state) {
  switch (state) {
    case CellState::kOccupiedAfterFree:
      return MotionClass::kMovable;
    case CellState::kOccupiedStatic:
      return MotionClass::kStationary;
    default:
      return MotionClass::kPotentiallyMovable;
  }
}

void ConsistencyGrid::classify_points(SphericalScan& scan, const ChannelGeometry& geom) const {
  for (size_t i = 0; i < scan.cell_count(); ++i) {
    const Measurement& m = scan.at(i);
    if (!m.valid) continue;
    AttributeSet& attr = scan.attributes(i);
    if (attr.ground_class != GroundClass::kElevated) continue;
    attr.motion_class = classify(state_at(geom.world_position(scan, scan.position_at(i), m)));
  }
}

void ConsistencyGrid::dump_csv(std::ostream& os) const {
  os << "x,y,state,hits,frees\n";
  const double cell = params_.cell_size_m;
  for (const Cell& c : cells_) {
    if (c.owner_x == INT32_MIN) continue;
    os << (c.owner_x + 0.5) * cell << ',' << (c.owner_y + 0.5) * cell << ','
       << static_cast<int>(c.state) << ',' << static_cast<int>(c.hit_streak) << ','
       << static_cast<int>(c.free_streak) << "\n";
  }
}

MotionClass vote(const std::vector<MotionClass>& classes) {
  int counts[4] = {0, 0, 0, 0};
  for (const MotionClass c : classes) ++counts[static_cast<int>(c)];
  const int stationary = counts[static_cast<int>(MotionClass::kStationary)];
  const int movable = counts[static_cast<int>(MotionClass::kMovable)];
  const int potentially = counts[static_cast<int>(MotionClass::kPotentiallyMovable)];
  const int best = std::max({stationary, movable, potentially});
  if (best == 0) return MotionClass::kUnknown;
  const int winners = (stationary == best) + (movable == best) + (potentially == best);
  if (winners > 1) return MotionClass::kPotentiallyMovable;
  if (stationary == best) return MotionClass::kStationary;
  if (movable == best) return MotionClass::kMovable;
  return MotionClass::kPotentiallyMovable;
}

std::vector<MotionClass> cluster_vote(const ClusterLabeling& labeling,
                                      std::vector<Volume>& volumes, SphericalScan& scan,
                                      const std::vector<PointVolumeRef>& refs) {
  // Volume class: plurality over its contributing points.
  std::vector<std::array<int, 4>> counts(volumes.size(), {0, 0, 0, 0});
  for (const PointVolumeRef& ref : refs) {
    if (ref.volume < 0) continue;
    ++counts[ref.volume][static_cast<int>(scan.attributes(ref.scan_cell).motion_class)];
  }
  for (size_t i = 0; i < volumes.size(); ++i) {
    std::vector<MotionClass> expanded;
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < counts[i][c]; ++k) expanded.push_back(static_cast<MotionClass>(c));
    volumes[i].motion = expanded.empty() ? MotionClass::kPotentiallyMovable : vote(expanded);
  }

  std::vector<MotionClass> result(labeling.clusters.size(), MotionClass::kPotentiallyMovable);
  for (size_t c = 0; c < labeling.clusters.size(); ++c) {
    std::vector<MotionClass> member_classes;
    member_classes.reserve(labeling.clusters[c].members.size());
    for (const int v : labeling.clusters[c].members) member_classes.push_back(volumes[v].motion);
    result[c] = vote(member_classes);
    for (const int v : labeling.clusters[c].members) volumes[v].motion = result[c];
  }

  // Forward the cluster decision to the member points.
  for (const PointVolumeRef& ref : refs) {
    if (ref.volume < 0) continue;
    const int label = labeling.label[ref.volume];
    if (label >= 0) scan.attributes(ref.scan_cell).motion_class = result[label];
  }
  return result;
}

}  // namespace percept
