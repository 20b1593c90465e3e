#pragma once

#include "percept/scan.hpp"
#include "percept/scene.hpp"

#include <cstdint>

namespace percept {

struct RaycastOptions {
  double range_noise_sigma{0.02};  // meters, Gaussian on range
  uint64_t seed{1};
  double min_range{0.15};
  double echo_separation{0.5};  // min range gap between first and second return
};

struct SimulatedScan {
  SphericalScan scan;
  GroundTruthFrame truth;
};

/// Casts one full sensor turn. Each firing is cast from the ego pose at its
/// own time offset; the nearest surface fills slice 0 and, when a second
/// surface intersects the beam footprint, the next one fills slice 1. Misses
/// leave cells unpopulated. Truth lists actors within sensor range at scan
/// end.
SimulatedScan raycast_scan(const Scene& scene, const SensorConfig& sensor, int64_t scan_index,
                           const RaycastOptions& options);

/// Convenience: simulate `n_scans` consecutive turns and collect the truth.
struct Recording {
  std::vector<SphericalScan> scans;
  GroundTruth truth;
};
Recording simulate(const Scene& scene, const SensorConfig& sensor, int n_scans,
                   const RaycastOptions& options);

}  // namespace percept
