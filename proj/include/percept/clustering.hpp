#pragma once

#include "percept/compression.hpp"

#include <vector>

namespace percept {

struct ClusterParams {
  double noise_floor_m{0.1};        // s0
  double breakpoint_angle_deg{10.0};  // lambda_max
  double height_gap_max_m{0.5};     // dh_max
  int channel_lookback{3};

  void validate(double azimuth_step_deg) const;
};

/// Exact law-of-cosines distance between two returns separated by the given
/// azimuth step.
double radial_distance(double r_n, double r_m, double delta_phi_deg);
/// The small-angle shortcut it replaces.
inline double radial_distance_approx(double r_n, double r_m) { return std::abs(r_n - r_m); }

/// Range-dependent clustering threshold s = s0 + min(r_n, r_m) * s1 with s1
/// from the breakpoint angle.
double distance_threshold(double r_n, double r_m, const ClusterParams& params,
                          double azimuth_step_deg);

/// Vertical extents overlap or the gap stays within the tolerance.
bool height_overlap(const Volume& a, const Volume& b, double height_gap_max_m);

struct Cluster {
  std::vector<int> members;  // volume indices
  int point_count{0};
  double z_min{1e30}, z_max{-1e30};
};

struct ClusterLabeling {
  std::vector<int> label;  // per volume, dense ids
  std::vector<Cluster> clusters;
};

/// Connected components over similarity edges between volumes in channels at
/// most `channel_lookback` apart (wrapping), including same-channel pairs.
ClusterLabeling cluster(const std::vector<Volume>& volumes, const ClusterParams& params,
                        int n_channels, double azimuth_step_deg);

/// Writes cluster ids back to the contributing points' attributes.
void write_cluster_labels(SphericalScan& scan, const std::vector<PointVolumeRef>& refs,
                          const ClusterLabeling& labeling);

}  // namespace percept
