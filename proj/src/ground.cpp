#include "percept/ground.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace percept {

void GroundParams::validate() const {
  if (cell_size_m <= 0.0) throw ValidationError("ground: cell size must be positive");
  if (slope_max_deg <= 0.0 || slope_max_deg >= 90.0)
    throw ValidationError("ground: slope limit must be in (0, 90) deg");
  if (seed_tolerance_m <= 0.0 || dz_ground_m <= 0.0)
    throw ValidationError("ground: tolerances must be positive");
  if (fill_iterations < 0) throw ValidationError("ground: fill iterations must be >= 0");
  if (curb_height_min_m >= curb_height_max_m)
    throw ValidationError("ground: curb height interval empty");
}

HeightGrid::HeightGrid(const Vec2& center, double half_extent_m, double cell_size_m)
    : cell_size_(cell_size_m) {
  size_ = std::max(1, static_cast<int>(std::ceil(2.0 * half_extent_m / cell_size_m)));
  origin_ = center - 0.5 * size_ * cell_size_ * Vec2(1.0, 1.0);
  height_.assign(static_cast<size_t>(size_) * size_, 0.0);
  support_.assign(static_cast<size_t>(size_) * size_, 0);
  filled_.assign(static_cast<size_t>(size_) * size_, 0);
}

void HeightGrid::dump_csv(std::ostream& os) const {
  os << "x,y,height,support,filled\n";
  for (int i = 0; i < size_ * size_; ++i) {
    if (!resolved(i)) continue;
    const Vec2 c = cell_center(i);
    os << c.x() << ',' << c.y() << ',' << height_[i] << ',' << support_[i] << ','
       << static_cast<int>(filled_[i]) << "\n";
  }
}

void preclassify_slope(SphericalScan& scan, const ChannelGeometry& geom, const GroundParams& params) {
  params.validate();
  const SensorConfig& cfg = scan.config();
  const double tan_slope = std::tan(deg_to_rad(params.slope_max_deg));
  const double mount = cfg.mount_height_m;

  for (int channel = 0; channel < cfg.n_channels; ++channel) {
    double prev_d = 0.0;
    double prev_z = -mount;  // virtual seed at the mount foot
    bool anchored = false;
    bool first_return = true;
    for (int layer = 0; layer < cfg.n_layers; ++layer) {
      const LogicalPosition p{layer, channel, 0};
      const Measurement& m = scan.at(p);
      if (!m.valid) continue;
      const double d = scan.horizontal_distance(m);
      const double z = scan.sensor_relative_z(m);

      bool candidate;
      if (first_return) {
        candidate = std::abs(z + mount) <= params.seed_tolerance_m;
        first_return = false;
      } else {
        const double dd = d - prev_d;
        const double slope = std::abs(z - prev_z) / std::max(dd, 1e-3);
        candidate = dd > 0.0 && slope <= tan_slope;
      }
      if (candidate) {
        scan.attributes(p).set(AttributeSet::kGroundCandidate);
        prev_d = d;
        prev_z = z;
        anchored = true;
      }
    }
    (void)anchored;
    (void)geom;
  }
}

HeightGrid build_height_grid(const SphericalScan& scan, const ChannelGeometry& geom,
                             const GroundParams& params) {
  const SensorConfig& cfg = scan.config();
  const Pose2 ego0 = geom.poses.front();
  HeightGrid grid(ego0.position, cfg.max_range_m, params.cell_size_m);

  // Gather candidate (cell, z) pairs, then per-cell medians.
  std::vector<std::pair<int, float>> entries;
  entries.reserve(4096);
  for (size_t i = 0; i < scan.cell_count(); ++i) {
    const auto& attr = scan.attributes(i);
    if (!attr.has(AttributeSet::kGroundCandidate)) continue;
    const Measurement& m = scan.at(i);
    const LogicalPosition p = scan.position_at(i);
    const auto idx = grid.cell_index(geom.world_position(scan, p, m));
    if (!idx) continue;
    entries.emplace_back(*idx, static_cast<float>(scan.sensor_relative_z(m)));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<float> zbuf;
  for (size_t i = 0; i < entries.size();) {
    size_t j = i;
    zbuf.clear();
    while (j < entries.size() && entries[j].first == entries[i].first) zbuf.push_back(entries[j++].second);
    std::nth_element(zbuf.begin(), zbuf.begin() + zbuf.size() / 2, zbuf.end());
    grid.set_supported(entries[i].first, zbuf[zbuf.size() / 2], static_cast<int>(zbuf.size()));
    i = j;
  }

  // 3x3 spatial median over supported cells.
  const int n = grid.size();
  std::vector<std::pair<int, double>> updates;
  std::array<double, 9> window;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int idx = iy * n + ix;
      if (!grid.supported(idx)) continue;
      int count = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
          const int jdx = jy * n + jx;
          if (grid.supported(jdx)) window[count++] = grid.height(jdx);
        }
      }
      std::nth_element(window.begin(), window.begin() + count / 2, window.begin() + count);
      updates.emplace_back(idx, window[count / 2]);
    }
  }
  for (const auto& [idx, h] : updates) grid.set_height(idx, h);
  return grid;
}

void region_fill(HeightGrid& grid, const GroundParams& params) {
  const int n = grid.size();
  // Frontier sweep: only unresolved cells bordering a resolved one can fill,
  // so each iteration touches the boundary instead of the whole grid.
  std::vector<int> frontier;
  std::vector<uint8_t> in_frontier(static_cast<size_t>(n) * n, 0);
  auto add_unresolved_neighbors = [&](int ix, int iy) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
        const int jdx = jy * n + jx;
        if (!grid.resolved(jdx) && !in_frontier[jdx]) {
          in_frontier[jdx] = 1;
          frontier.push_back(jdx);
        }
      }
    }
  };
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (grid.resolved(iy * n + ix)) add_unresolved_neighbors(ix, iy);

  std::vector<std::pair<int, double>> fills;
  std::vector<int> carry;
  for (int iter = 0; iter < params.fill_iterations && !frontier.empty(); ++iter) {
    fills.clear();
    for (const int idx : frontier) {
      const int ix = idx % n;
      const int iy = idx / n;
      int count = 0;
      double sum = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
          const int jdx = jy * n + jx;
          if (grid.resolved(jdx)) {
            sum += grid.height(jdx);
            ++count;
          }
        }
      }
      if (count >= 3) fills.emplace_back(idx, sum / count);
    }
    if (fills.empty()) break;
    carry.clear();
    for (const int idx : frontier)
      if (grid.resolved(idx) == false) carry.push_back(idx);  // stays pending unless filled now
    for (const auto& [idx, h] : fills) grid.set_filled(idx, h);
    frontier.clear();
    for (const int idx : carry)
      if (!grid.resolved(idx)) frontier.push_back(idx);
    for (const auto& [idx, h] : fills) add_unresolved_neighbors(idx % n, idx / n);
  }
}

void classify_ground(SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& grid,
                     const GroundParams& params) {
  for (size_t i = 0; i < scan.cell_count(); ++i) {
    const Measurement& m = scan.at(i);
    if (!m.valid) continue;
    const LogicalPosition p = scan.position_at(i);
    AttributeSet& attr = scan.attributes(i);
    const auto h = grid.height_at(geom.world_position(scan, p, m));
    if (!h) {
      attr.ground_class = GroundClass::kElevated;
      attr.set(AttributeSet::kElevatedFlag);
      attr.set(AttributeSet::kUnknownSurface);
      continue;
    }
    if (std::abs(scan.sensor_relative_z(m) - *h) <= params.dz_ground_m) {
      attr.ground_class = GroundClass::kGround;
    } else {
      attr.ground_class = GroundClass::kElevated;
      attr.set(AttributeSet::kElevatedFlag);
    }
  }
}

namespace {

struct LinePoint {
  Vec2 xy;
  double z;
  int channel;
  size_t cell;
};

double point_line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len < 1e-9) return (p - a).norm();
  const Vec2 d = ab / len;
  const Vec2 off = p - a;
  return std::abs(d.x() * off.y() - d.y() * off.x());
}

void split_recursive(const std::vector<LinePoint>& pts, size_t lo, size_t hi, double threshold,
                     std::vector<size_t>& breaks) {
  if (hi - lo < 3) return;
  double max_d = 0.0;
  size_t max_i = lo;
  for (size_t i = lo + 1; i < hi; ++i) {
    const double d = point_line_distance(pts[i].xy, pts[lo].xy, pts[hi].xy);
    if (d > max_d) {
      max_d = d;
      max_i = i;
    }
  }
  if (max_d > threshold) {
    split_recursive(pts, lo, max_i, threshold, breaks);
    breaks.push_back(max_i);
    split_recursive(pts, max_i, hi, threshold, breaks);
  }
}

double median_of(std::vector<double>& v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

void detect_curbs(SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& grid,
                  const GroundParams& params) {
  const SensorConfig& cfg = scan.config();
  (void)grid;

  for (int layer = 0; layer < cfg.n_layers; ++layer) {
    // Ground-classified slice-0 points of this scan line, in channel order.
    // Vertical faces stay elevated, so a joint onto a wall base never sees a
    // ground segment on its far side.
    std::vector<LinePoint> pts;
    for (int channel = 0; channel < cfg.n_channels; ++channel) {
      const LogicalPosition p{layer, channel, 0};
      const Measurement& m = scan.at(p);
      if (!m.valid) continue;
      if (scan.attributes(p).ground_class != GroundClass::kGround) continue;
      const Vec2 xy = geom.world_position(scan, p, m);
      pts.push_back({xy, scan.sensor_relative_z(m), channel, scan.index_of(p)});
    }
    if (pts.size() < 8) continue;

    // Chains break at long channel gaps or large horizontal jumps. Short
    // gaps stay inside one chain: a step face returns nothing, and the jump
    // onto the upper level is exactly the joint of interest.
    std::vector<std::pair<size_t, size_t>> chains;
    size_t start = 0;
    for (size_t i = 1; i <= pts.size(); ++i) {
      const bool gap = i == pts.size() || pts[i].channel - pts[i - 1].channel > 64 ||
                       (pts[i].xy - pts[i - 1].xy).norm() > 1.5;
      if (gap) {
        if (i - start >= 8) chains.emplace_back(start, i - 1);
        start = i;
      }
    }

    for (const auto& [lo, hi] : chains) {
      std::vector<size_t> breaks;
      split_recursive(pts, lo, hi, params.split_merge_dist_m, breaks);

      for (const size_t joint : breaks) {
        if (joint < lo + 3 || joint + 3 > hi) continue;

        // Height step across the joint: medians of the three points on each side.
        std::vector<double> za{pts[joint - 3].z, pts[joint - 2].z, pts[joint - 1].z};
        std::vector<double> zb{pts[joint + 1].z, pts[joint + 2].z, pts[joint + 3].z};
        const double step = std::abs(median_of(zb) - median_of(za));
        if (step < params.curb_height_min_m || step > params.curb_height_max_m) continue;

        // Near-straight continuation: interior angle between local segment
        // directions on both sides of the joint.
        const size_t wa = std::max(lo, joint - 8);
        const size_t wb = std::min(hi, joint + 8);
        const Vec2 dir_a = (pts[joint].xy - pts[wa].xy).normalized();
        const Vec2 dir_b = (pts[wb].xy - pts[joint].xy).normalized();
        const double turn = rad_to_deg(std::acos(std::clamp(dir_a.dot(dir_b), -1.0, 1.0)));
        if (180.0 - turn < params.curb_joint_angle_min_deg) continue;

        // Local point density around the joint (points per meter over a 1 m span).
        const size_t da = joint >= lo + 50 ? joint - 50 : lo;
        const size_t db = std::min(hi, joint + 50);
        int dense = 0;
        for (size_t i = da; i <= db; ++i)
          if ((pts[i].xy - pts[joint].xy).norm() <= 0.5) ++dense;
        if (dense < params.curb_density_min_per_m) continue;

        for (size_t i = wa; i <= wb; ++i)
          if ((pts[i].xy - pts[joint].xy).norm() <= 0.25)
            scan.attributes(pts[i].cell).set(AttributeSet::kCurb);
      }
    }
  }
}

HeightGrid run_ground_stage(SphericalScan& scan, const ChannelGeometry& geom,
                            const GroundParams& params) {
  preclassify_slope(scan, geom, params);
  HeightGrid grid = build_height_grid(scan, geom, params);
  region_fill(grid, params);
  classify_ground(scan, geom, grid, params);
  detect_curbs(scan, geom, grid, params);
  return grid;
}

}  // namespace percept
