#include "percept/clustering.hpp"

#include "percept/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace percept {

void ClusterParams::validate(double azimuth_step_deg) const {
  if (noise_floor_m < 0.0) throw ValidationError("clustering: noise floor must be >= 0");
  if (breakpoint_angle_deg <= azimuth_step_deg)
    throw ValidationError("clustering: breakpoint angle must exceed the azimuth step");
  if (channel_lookback < 1) throw ValidationError("clustering: lookback must be >= 1");
  if (height_gap_max_m < 0.0) throw ValidationError("clustering: height gap must be >= 0");
}

double radial_distance(double r_n, double r_m, double delta_phi_deg) {
  const double c = std::cos(deg_to_rad(delta_phi_deg));
  return std::sqrt(std::max(0.0, r_n * r_n + r_m * r_m - 2.0 * r_n * r_m * c));
}

double distance_threshold(double r_n, double r_m, const ClusterParams& params,
                          double azimuth_step_deg) {
  if (params.breakpoint_angle_deg <= azimuth_step_deg)
    throw ConfigError("clustering: breakpoint angle must exceed the azimuth step");
  const double s1 = std::sin(deg_to_rad(azimuth_step_deg)) /
                    std::sin(deg_to_rad(params.breakpoint_angle_deg - azimuth_step_deg));
  return params.noise_floor_m + std::min(r_n, r_m) * s1;
}

bool height_overlap(const Volume& a, const Volume& b, double height_gap_max_m) {
  const double lo = std::max(a.z_min, b.z_min);
  const double hi = std::min(a.z_min + a.h, b.z_min + b.h);
  return lo - hi <= height_gap_max_m;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

ClusterLabeling cluster(const std::vector<Volume>& volumes, const ClusterParams& params,
                        int n_channels, double azimuth_step_deg) {
  params.validate(azimuth_step_deg);
  const int n = static_cast<int>(volumes.size());
  ClusterLabeling out;
  out.label.assign(n, -1);
  if (n == 0) return out;

  // Volumes grouped per channel for the lookback sweep.
  std::vector<std::vector<int>> per_channel(n_channels);
  for (int i = 0; i < n; ++i) per_channel[volumes[i].channel].push_back(i);

  UnionFind uf(n);
  auto try_edge = [&](int i, int j, int channel_gap) {
    const Volume& a = volumes[i];
    const Volume& b = volumes[j];
    if (!height_overlap(a, b, params.height_gap_max_m)) return;
    const double d = channel_gap == 0
                         ? radial_distance_approx(a.r_min, b.r_min)
                         : radial_distance(a.r_min, b.r_min, channel_gap * azimuth_step_deg);
    if (d <= distance_threshold(a.r_min, b.r_min, params, azimuth_step_deg)) uf.unite(i, j);
  };

  for (int c = 0; c < n_channels; ++c) {
    const auto& here = per_channel[c];
    if (here.empty()) continue;
    for (size_t a = 0; a < here.size(); ++a)
      for (size_t b = a + 1; b < here.size(); ++b) try_edge(here[a], here[b], 0);
    for (int k = 1; k <= params.channel_lookback; ++k) {
      int pc = c - k;
      if (pc < 0) pc += n_channels;
      if (pc == c) continue;
      for (const int i : here)
        for (const int j : per_channel[pc]) try_edge(i, j, k);
    }
  }

  // Dense labels in first-seen order.
  std::vector<int> root_to_label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (root_to_label[root] < 0) {
      root_to_label[root] = next++;
      out.clusters.emplace_back();
    }
    const int label = root_to_label[root];
    out.label[i] = label;
    Cluster& cl = out.clusters[label];
    cl.members.push_back(i);
    cl.point_count += volumes[i].point_count;
    cl.z_min = std::min(cl.z_min, volumes[i].z_min);
    cl.z_max = std::max(cl.z_max, volumes[i].z_min + volumes[i].h);
  }
  return out;
}

void write_cluster_labels(SphericalScan& scan, const std::vector<PointVolumeRef>& refs,
                          const ClusterLabeling& labeling) {
  for (const PointVolumeRef& ref : refs) {
    if (ref.volume < 0) continue;
    scan.attributes(static_cast<size_t>(ref.scan_cell)).cluster_label =
        labeling.label[ref.volume];
  }
}

}  // namespace percept
