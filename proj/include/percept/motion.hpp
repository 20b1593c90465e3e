#pragma once

#include "percept/clustering.hpp"
#include "percept/ground.hpp"

#include <iosfwd>

namespace percept {

struct MotionParams {
  double cell_size_m{0.5};
  int confirm_hits{3};     // consecutive hit observations until confirmed static
  int free_hits{3};        // consecutive free observations until a cell frees
  double window_m{100.0};  // scrolling window; widened to cover 2x sensor range
  double block_clearance_m{2.5};  // endpoints above this stay non-blocking (overhangs)

  void validate() const;
};

enum class CellState : uint8_t {
  kUnknown = 0,
  kFree = 1,
  kOccupiedNew = 2,
  kOccupiedStatic = 3,
  kOccupiedAfterFree = 4,  // movable evidence
};

/// Ego-anchored consistency grid with a scrolling origin. Cells are addressed
/// by world cell coordinates hashed onto a torus; a slot whose owner moved out
/// of the window resets to unknown on reuse.
class ConsistencyGrid {
 public:
  ConsistencyGrid() = default;

  void configure(const MotionParams& params, double max_range_m);

  /// One scan's worth of free/hit observations followed by the FSM pass.
  /// Rays run per channel out to the nearest blocking elevated endpoint;
  /// ground endpoints beyond it still stamp their own cells free. Hits apply
  /// at elevated first-return endpoints.
  void update(const SphericalScan& scan, const ChannelGeometry& geom, const HeightGrid& ground);

  CellState state_at(const Vec2& world) const;
  int64_t last_transition_scan(const Vec2& world) const;

  /// Per-point motion classes from the cell states.
  static MotionClass classify(CellState state);
  void classify_points(SphericalScan& scan, const ChannelGeometry& geom) const;

  void dump_csv(std::ostream& os) const;
  double cell_size() const { return params_.cell_size_m; }

 private:
  struct Cell {
    int32_t owner_x{INT32_MIN};
    int32_t owner_y{INT32_MIN};
    CellState state{CellState::kUnknown};
    uint8_t hit_streak{0};
    uint8_t free_streak{0};
    uint8_t obs{0};  // per-scan observation bits: 1 free, 2 hit
    int64_t transition_scan{-1};
  };

  Cell& slot(int32_t cx, int32_t cy);
  const Cell* slot_if_owner(int32_t cx, int32_t cy) const;
  Cell& observed(int32_t cx, int32_t cy);

  MotionParams params_;
  int n_{0};
  std::vector<Cell> cells_;
  std::vector<uint32_t> touched_;
  int64_t scan_index_{-1};
};

/// Majority vote over member volume classes; ties fall back to potentially
/// movable. Also refines the member volumes and their points to the voted
/// class.
std::vector<MotionClass> cluster_vote(const ClusterLabeling& labeling,
                                      std::vector<Volume>& volumes, SphericalScan& scan,
                                      const std::vector<PointVolumeRef>& refs);

/// Plurality with the tie rule, exposed for direct testing.
MotionClass vote(const std::vector<MotionClass>& classes);

}  // namespace percept
