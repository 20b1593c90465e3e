#pragma once

#include "percept/compression.hpp"
#include "percept/ground.hpp"

#include <iosfwd>

namespace percept {

struct StationaryParams {
  double cell_size_m{0.25};
  double window_m{120.0};  // widened to cover 2x sensor range when needed
  double logodds_hit{0.85};
  double logodds_free{-0.4};
  double logodds_clamp{5.0};
  double tau_existent{1.0};
  double tau_nonexistent{-1.0};
  double curb_weight_scale{0.5};
  int visibility_horizon_scans{20};  // T_vis
  double marking_intensity_min{0.7};
  double underrun_clearance_m{2.5};
  double visibility_interp_gap_m{2.0};

  void validate() const;
};

enum class Tristate : uint8_t { kIndecisive = 0, kExistent = 1, kNonExistent = 2 };

/// Priority-ordered semantic classes; larger value wins ties.
enum class SemanticClass : uint8_t {
  kUnknown = 0,
  kFreeImplicit = 1,
  kMarking = 2,
  kTraversableExplicit = 3,
  kCurb = 4,
  kElevated = 5,
};

const char* to_string(SemanticClass c);

/// Snapshot of the fused semantic view, ego-window aligned.
struct FusionLayer {
  Vec2 origin{0.0, 0.0};  // world position of cell (0,0) min corner
  double cell_size{0.25};
  int size{0};
  std::vector<SemanticClass> classes;
  std::vector<Tristate> occupied_lower;
  std::vector<Tristate> occupied_upper;
  std::vector<Tristate> curb;
  std::vector<Tristate> traversable;
  std::vector<Tristate> marking;

  int index(int ix, int iy) const { return iy * size + ix; }
  bool contains(const Vec2& world) const {
    const double dx = world.x() - origin.x();
    const double dy = world.y() - origin.y();
    return dx >= 0.0 && dy >= 0.0 && dx < size * cell_size && dy < size * cell_size;
  }
  SemanticClass class_at(const Vec2& world) const {
    if (!contains(world)) return SemanticClass::kUnknown;
    const int ix = static_cast<int>((world.x() - origin.x()) / cell_size);
    const int iy = static_cast<int>((world.y() - origin.y()) / cell_size);
    return classes[index(ix, iy)];
  }
  Vec2 cell_center(int ix, int iy) const {
    return origin + cell_size * Vec2(ix + 0.5, iy + 0.5);
  }

  void write_pgm(std::ostream& os) const;
  void write_legend_csv(std::ostream& os) const;
};

/// Cell-wise fusion rule, exposed for direct rule tests.
SemanticClass fuse_cell(Tristate occupied_lower, Tristate curb, Tristate traversable,
                        Tristate marking);

/// Five feature layers over a scrolling window: occupancy with height bounds
/// (lower drivable band and upper/overhang band), curb evidence, ground
/// reflectance, and ground-visibility stamps.
class MultiLayerGridStack {
 public:
  void configure(const StationaryParams& params, double max_range_m);

  /// One scan: freespace along first-target rays up to the nearest relevant
  /// elevated endpoint (movable endpoints cap freespace but never generate
  /// hits), occupancy hits for non-movable elevated endpoints, height bounds
  /// from non-movable volumes, curb and reflectance updates from ground
  /// points, visibility stamps with cross-layer interpolation.
  void update(const SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& ground,
              const std::vector<Volume>& volumes);

  FusionLayer fuse(const Vec2& window_center) const;

  double occupancy_lower_at(const Vec2& world) const;
  double occupancy_upper_at(const Vec2& world) const;
  double curb_at(const Vec2& world) const;
  double reflectance_at(const Vec2& world) const;   // -1 when no samples
  int64_t visibility_at(const Vec2& world) const;   // -1 when never seen
  double height_lower_at(const Vec2& world) const;  // +inf when unset
  double height_upper_at(const Vec2& world) const;  // -inf when unset

  /// Direct single-cell feature updates; the scan path goes through these.
  void apply_occupancy(const Vec2& world, bool hit, bool upper_band);
  void apply_heights(const Vec2& world, double z_min, double z_top, bool sub_clearance);
  void apply_curb(const Vec2& world, bool curb_evidence);
  void apply_reflectance(const Vec2& world, double intensity);
  void apply_visibility(const Vec2& world, int64_t scan_index);

  const StationaryParams& params() const { return params_; }
  int64_t current_scan() const { return scan_index_; }
  void set_current_scan(int64_t s) { scan_index_ = s; }

 private:
  struct Cell {
    int32_t owner_x{INT32_MIN};
    int32_t owner_y{INT32_MIN};
    float occ_lower{0.0f};
    float occ_upper{0.0f};
    float height_lower{1e30f};
    float height_upper{-1e30f};
    float curb{0.0f};
    float refl_sum{0.0f};
    uint16_t refl_count{0};
    int32_t visibility{-1};
  };

  Cell& writable(int32_t cx, int32_t cy);
  const Cell* readable(int32_t cx, int32_t cy) const;
  const Cell* readable_world(const Vec2& world) const;

  StationaryParams params_;
  int n_{0};
  std::vector<Cell> cells_;
  int64_t scan_index_{-1};
};

struct RoadElement {
  Vec2 anchor;
  double yaw{0.0};
  double width{0.0}, length{0.0};
  std::array<int, 6> histogram{};  // per SemanticClass
  SemanticClass dominant{SemanticClass::kUnknown};
  bool outside_grid{false};
};

struct IntervalMap {
  std::vector<RoadElement> elements;
  void write_csv(std::ostream& os) const;
};

/// Road elements of size w x l tiled along the path; each element accumulates
/// the classes of the cells whose centers fall inside it.
IntervalMap extract_interval_map(const FusionLayer& fusion, const std::vector<Vec2>& path,
                                 double width, double length);

}  // namespace percept
