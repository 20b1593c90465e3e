#include "percept/stationary.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace percept {

void StationaryParams::validate() const {
  if (cell_size_m <= 0.0 || window_m <= 0.0)
    throw ValidationError("stationary: cell size and window must be positive");
  if (logodds_hit <= 0.0 || logodds_free >= 0.0)
    throw ValidationError("stationary: hit weight must be positive, free weight negative");
  if (logodds_clamp <= 0.0) throw ValidationError("stationary: clamp must be positive");
  if (tau_existent <= tau_nonexistent)
    throw ValidationError("stationary: tristate thresholds out of order");
  if (visibility_horizon_scans < 0) throw ValidationError("stationary: T_vis must be >= 0");
}

const char* to_string(SemanticClass c) {
  switch (c) {
    case SemanticClass::kUnknown: return "unknown";
    case SemanticClass::kFreeImplicit: return "free_implicit";
    case SemanticClass::kMarking: return "marking";
    case SemanticClass::kTraversableExplicit: return "traversable_explicit";
    case SemanticClass::kCurb: return "curb";
    case SemanticClass::kElevated: return "elevated";
  }
  return "unknown";
}

SemanticClass fuse_cell(Tristate occupied_lower, Tristate curb, Tristate traversable,
                        Tristate marking) {
  if (occupied_lower == Tristate::kExistent) return SemanticClass::kElevated;
  if (curb == Tristate::kExistent) return SemanticClass::kCurb;
  if (traversable == Tristate::kExistent) return SemanticClass::kTraversableExplicit;
  if (marking == Tristate::kExistent) return SemanticClass::kMarking;
  if (occupied_lower == Tristate::kNonExistent) return SemanticClass::kFreeImplicit;
  return SemanticClass::kUnknown;
}

void MultiLayerGridStack::configure(const StationaryParams& params, double max_range_m) {
  params.validate();
  params_ = params;
  const double window = std::max(params.window_m, 2.0 * max_range_m + 4.0 * params.cell_size_m);
  n_ = static_cast<int>(std::ceil(window / params.cell_size_m));
  cells_.assign(static_cast<size_t>(n_) * n_, Cell{});
  scan_index_ = -1;
}

MultiLayerGridStack::Cell& MultiLayerGridStack::writable(int32_t cx, int32_t cy) {
  int ix = cx % n_;
  if (ix < 0) ix += n_;
  int iy = cy % n_;
  if (iy < 0) iy += n_;
  Cell& c = cells_[static_cast<size_t>(iy) * n_ + ix];
  if (c.owner_x != cx || c.owner_y != cy) {
    c = Cell{};
    c.owner_x = cx;
    c.owner_y = cy;
  }
  return c;
}

const MultiLayerGridStack::Cell* MultiLayerGridStack::readable(int32_t cx, int32_t cy) const {
  int ix = cx % n_;
  if (ix < 0) ix += n_;
  int iy = cy % n_;
  if (iy < 0) iy += n_;
  const Cell& c = cells_[static_cast<size_t>(iy) * n_ + ix];
  if (c.owner_x != cx || c.owner_y != cy) return nullptr;
  return &c;
}

const MultiLayerGridStack::Cell* MultiLayerGridStack::readable_world(const Vec2& world) const {
  const double cell = params_.cell_size_m;
  return readable(static_cast<int32_t>(std::floor(world.x() / cell)),
                  static_cast<int32_t>(std::floor(world.y() / cell)));
}

void MultiLayerGridStack::apply_occupancy(const Vec2& world, bool hit, bool upper_band) {
  const double cell = params_.cell_size_m;
  Cell& c = writable(static_cast<int32_t>(std::floor(world.x() / cell)),
                     static_cast<int32_t>(std::floor(world.y() / cell)));
  float& lo = upper_band ? c.occ_upper : c.occ_lower;
  const double delta = hit ? params_.logodds_hit : params_.logodds_free;
  lo = static_cast<float>(std::clamp(static_cast<double>(lo) + delta, -params_.logodds_clamp,
                                     params_.logodds_clamp));
}

void MultiLayerGridStack::apply_heights(const Vec2& world, double z_min, double z_top,
                                        bool sub_clearance) {
  const double cell = params_.cell_size_m;
  Cell& c = writable(static_cast<int32_t>(std::floor(world.x() / cell)),
                     static_cast<int32_t>(std::floor(world.y() / cell)));
  if (sub_clearance) c.height_lower = std::min(c.height_lower, static_cast<float>(z_min));
  c.height_upper = std::max(c.height_upper, static_cast<float>(z_top));
}

void MultiLayerGridStack::apply_curb(const Vec2& world, bool curb_evidence) {
  const double cell = params_.cell_size_m;
  Cell& c = writable(static_cast<int32_t>(std::floor(world.x() / cell)),
                     static_cast<int32_t>(std::floor(world.y() / cell)));
  const double delta =
      params_.curb_weight_scale * (curb_evidence ? params_.logodds_hit : params_.logodds_free);
  c.curb = static_cast<float>(std::clamp(static_cast<double>(c.curb) + delta,
                                         -params_.logodds_clamp, params_.logodds_clamp));
}

void MultiLayerGridStack::apply_reflectance(const Vec2& world, double intensity) {
  const double cell = params_.cell_size_m;
  Cell& c = writable(static_cast<int32_t>(std::floor(world.x() / cell)),
                     static_cast<int32_t>(std::floor(world.y() / cell)));
  if (c.refl_count < 65535) {
    c.refl_sum += static_cast<float>(intensity);
    ++c.refl_count;
  }
}

void MultiLayerGridStack::apply_visibility(const Vec2& world, int64_t scan_index) {
  const double cell = params_.cell_size_m;
  Cell& c = writable(static_cast<int32_t>(std::floor(world.x() / cell)),
                     static_cast<int32_t>(std::floor(world.y() / cell)));
  c.visibility = std::max(c.visibility, static_cast<int32_t>(scan_index));
}

void MultiLayerGridStack::update(const SphericalScan& scan, const ChannelGeometry& geom,
                                 const HeightGrid& ground, const std::vector<Volume>& volumes) {
  const SensorConfig& cfg = scan.config();
  scan_index_ = scan.scan_index();
  const double cell = params_.cell_size_m;

  for (int channel = 0; channel < cfg.n_channels; ++channel) {
    const Pose2& ego = geom.poses[channel];
    struct GroundPoint {
      double d;
      Vec2 xy;
      double intensity;
      bool curb;
    };
    std::vector<GroundPoint> ground_points;
    ground_points.reserve(cfg.n_layers);
    double free_until = 0.0;
    double block_at = 1e30;

    for (int layer = 0; layer < cfg.n_layers; ++layer) {
      const LogicalPosition p{layer, channel, 0};
      const Measurement& m = scan.at(p);
      if (!m.valid) continue;
      const double d = scan.horizontal_distance(m);
      const Vec2 xy = geom.world_position(scan, p, m);
      const AttributeSet& attr = scan.attributes(p);
      free_until = std::max(free_until, d);
      if (attr.ground_class == GroundClass::kElevated) {
        const auto h = ground.height_at(xy);
        const double z_rel = scan.sensor_relative_z(m) - (h ? *h : -cfg.mount_height_m);
        const bool upper = z_rel > params_.underrun_clearance_m;
        if (!upper) block_at = std::min(block_at, d);
        if (attr.motion_class != MotionClass::kMovable) apply_occupancy(xy, true, upper);
      } else {
        ground_points.push_back({d, xy, m.intensity, attr.has(AttributeSet::kCurb)});
      }
    }
    free_until = std::min(free_until, block_at);

    // Freespace trace for the lower occupancy band.
    if (free_until > cell) {
      const double az = ego.yaw + deg_to_rad((channel + 0.5) * cfg.azimuth_step_deg);
      const Vec2 dir(std::cos(az), std::sin(az));
      const int steps = static_cast<int>((free_until - 0.5 * cell) / cell);
      // step along the ray at cell pitch; cheaper than exact DDA and dense
      // enough at quarter-meter cells
      Vec2 at = ego.position;
      int32_t last_cx = INT32_MIN, last_cy = INT32_MIN;
      for (int s = 0; s < steps; ++s) {
        at += cell * dir;
        const int32_t cx = static_cast<int32_t>(std::floor(at.x() / cell));
        const int32_t cy = static_cast<int32_t>(std::floor(at.y() / cell));
        if (cx == last_cx && cy == last_cy) continue;
        last_cx = cx;
        last_cy = cy;
        Cell& c = writable(cx, cy);
        c.occ_lower = static_cast<float>(std::clamp(
            static_cast<double>(c.occ_lower) + params_.logodds_free, -params_.logodds_clamp,
            params_.logodds_clamp));
      }
    }

    // Ground features: curb evidence, reflectance, visibility with
    // interpolation between adjacent layers' ground hits.
    std::sort(ground_points.begin(), ground_points.end(),
              [](const GroundPoint& a, const GroundPoint& b) { return a.d < b.d; });
    for (size_t i = 0; i < ground_points.size(); ++i) {
      const GroundPoint& g = ground_points[i];
      apply_curb(g.xy, g.curb);
      apply_reflectance(g.xy, g.intensity);
      apply_visibility(g.xy, scan_index_);
      if (i + 1 < ground_points.size()) {
        const GroundPoint& next = ground_points[i + 1];
        const double gap = next.d - g.d;
        if (gap > cell && gap <= params_.visibility_interp_gap_m) {
          const Vec2 dir = (next.xy - g.xy) / gap;
          for (double s = cell; s < gap; s += cell)
            apply_visibility(g.xy + s * dir, scan_index_);
        }
      }
    }
  }

  // Height bounds from the condensed volumes (non-movable only).
  for (const Volume& v : volumes) {
    if (v.motion == MotionClass::kMovable) continue;
    const Pose2& ego = geom.poses[v.channel];
    const double az = ego.yaw + deg_to_rad(v.phi_deg);
    const Vec2 xy = ego.position + v.r_min * Vec2(std::cos(az), std::sin(az));
    const bool sub = v.z_min <= params_.underrun_clearance_m;
    apply_heights(xy, v.z_min, v.z_min + v.h, sub);
  }
}

double MultiLayerGridStack::occupancy_lower_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->occ_lower : 0.0;
}
double MultiLayerGridStack::occupancy_upper_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->occ_upper : 0.0;
}
double MultiLayerGridStack::curb_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->curb : 0.0;
}
double MultiLayerGridStack::reflectance_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  if (!c || c->refl_count == 0) return -1.0;
  return c->refl_sum / c->refl_count;
}
int64_t MultiLayerGridStack::visibility_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->visibility : -1;
}
double MultiLayerGridStack::height_lower_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->height_lower : 1e30;
}
double MultiLayerGridStack::height_upper_at(const Vec2& world) const {
  const Cell* c = readable_world(world);
  return c ? c->height_upper : -1e30;
}

FusionLayer MultiLayerGridStack::fuse(const Vec2& window_center) const {
  FusionLayer out;
  out.cell_size = params_.cell_size_m;
  out.size = n_;
  const double half = 0.5 * n_ * params_.cell_size_m;
  const int32_t ox = static_cast<int32_t>(std::floor((window_center.x() - half) / params_.cell_size_m));
  const int32_t oy = static_cast<int32_t>(std::floor((window_center.y() - half) / params_.cell_size_m));
  out.origin = Vec2(ox * params_.cell_size_m, oy * params_.cell_size_m);
  const size_t total = static_cast<size_t>(n_) * n_;
  out.classes.assign(total, SemanticClass::kUnknown);
  out.occupied_lower.assign(total, Tristate::kIndecisive);
  out.occupied_upper.assign(total, Tristate::kIndecisive);
  out.curb.assign(total, Tristate::kIndecisive);
  out.traversable.assign(total, Tristate::kIndecisive);
  out.marking.assign(total, Tristate::kIndecisive);

  auto tri = [this](double v) {
    if (v > params_.tau_existent) return Tristate::kExistent;
    if (v < params_.tau_nonexistent) return Tristate::kNonExistent;
    return Tristate::kIndecisive;
  };

  for (int iy = 0; iy < n_; ++iy) {
    for (int ix = 0; ix < n_; ++ix) {
      const Cell* c = readable(ox + ix, oy + iy);
      if (!c) continue;
      const int idx = out.index(ix, iy);
      out.occupied_lower[idx] = tri(c->occ_lower);
      out.occupied_upper[idx] = tri(c->occ_upper);
      out.curb[idx] = tri(c->curb);
      if (c->visibility >= 0) {
        out.traversable[idx] = scan_index_ - c->visibility <= params_.visibility_horizon_scans
                                   ? Tristate::kExistent
                                   : Tristate::kIndecisive;
      }
      if (c->refl_count > 0) {
        out.marking[idx] = c->refl_sum / c->refl_count >= params_.marking_intensity_min
                               ? Tristate::kExistent
                               : Tristate::kNonExistent;
      }
      out.classes[idx] =
          fuse_cell(out.occupied_lower[idx], out.curb[idx], out.traversable[idx], out.marking[idx]);
    }
  }
  return out;
}

void FusionLayer::write_pgm(std::ostream& os) const {
  os << "P5\n" << size << ' ' << size << "\n255\n";
  // row 0 at the top = max y
  for (int iy = size - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < size; ++ix) {
      const uint8_t v = static_cast<uint8_t>(42 * static_cast<int>(classes[index(ix, iy)]));
      os.put(static_cast<char>(v));
    }
  }
}

void FusionLayer::write_legend_csv(std::ostream& os) const {
  os << "gray,class\n";
  for (int c = 0; c <= 5; ++c)
    os << 42 * c << ',' << to_string(static_cast<SemanticClass>(c)) << "\n";
}

IntervalMap extract_interval_map(const FusionLayer& fusion, const std::vector<Vec2>& path,
                                 double width, double length) {
  IntervalMap map;
  if (path.size() < 2 || width <= 0.0 || length <= 0.0) return map;
  const double total = polyline_length(path);
  const int n_elements = static_cast<int>(std::floor(total / length));
  const double cs = fusion.cell_size;

  for (int e = 0; e < n_elements; ++e) {
    const double s = (e + 0.5) * length;
    RoadElement re;
    re.anchor = polyline_point_at(path, s);
    const Vec2 dir = polyline_direction_at(path, s);
    re.yaw = std::atan2(dir.y(), dir.x());
    re.width = width;
    re.length = length;

    const OrientedBox box{re.anchor, re.yaw, length, width};
    const auto corners = box.corners();
    double min_x = 1e30, max_x = -1e30, min_y = 1e30, max_y = -1e30;
    for (const Vec2& c : corners) {
      min_x = std::min(min_x, c.x());
      max_x = std::max(max_x, c.x());
      min_y = std::min(min_y, c.y());
      max_y = std::max(max_y, c.y());
    }
    const Eigen::Matrix2d inv = rotation2d(-re.yaw);
    const int ix0 = static_cast<int>(std::floor((min_x - fusion.origin.x()) / cs));
    const int ix1 = static_cast<int>(std::floor((max_x - fusion.origin.x()) / cs));
    const int iy0 = static_cast<int>(std::floor((min_y - fusion.origin.y()) / cs));
    const int iy1 = static_cast<int>(std::floor((max_y - fusion.origin.y()) / cs));
    bool clipped = false;
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        if (ix < 0 || iy < 0 || ix >= fusion.size || iy >= fusion.size) {
          clipped = true;
          continue;
        }
        const Vec2 local = inv * (fusion.cell_center(ix, iy) - re.anchor);
        if (std::abs(local.x()) > 0.5 * length || std::abs(local.y()) > 0.5 * width) continue;
        ++re.histogram[static_cast<int>(fusion.classes[fusion.index(ix, iy)])];
      }
    }
    re.outside_grid = clipped;
    if (clipped && std::accumulate(re.histogram.begin(), re.histogram.end(), 0) == 0) {
      re.dominant = SemanticClass::kUnknown;
    } else {
      int best = 0;
      for (int c = 1; c <= 5; ++c)
        if (re.histogram[c] >= re.histogram[best]) best = c;  // ties toward priority
      re.dominant = static_cast<SemanticClass>(best);
    }
    map.elements.push_back(re);
  }
  return map;
}

void IntervalMap::write_csv(std::ostream& os) const {
  os << "anchor_x,anchor_y,yaw,width,length,dominant,unknown,free_implicit,marking,"
        "traversable_explicit,curb,elevated,outside\n";
  for (const RoadElement& e : elements) {
    os << e.anchor.x() << ',' << e.anchor.y() << ',' << e.yaw << ',' << e.width << ',' << e.length
       << ',' << to_string(e.dominant);
    for (int c = 0; c <= 5; ++c) os << ',' << e.histogram[c];
    os << ',' << (e.outside_grid ? 1 : 0) << "\n";
  }
}

}  // namespace percept
