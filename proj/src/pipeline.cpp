#include "percept/pipeline.hpp"

#include <chrono>

namespace percept {

namespace {

class StageClock {
 public:
  StageClock() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Pipeline::Pipeline(const PipelineConfig& config, const SensorConfig& sensor)
    : config_(config), sensor_(sensor), tracker_(config.tracker) {
  config_.validate();
  sensor_.validate();
  consistency_.configure(config_.motion, sensor_.max_range_m);
  stationary_.configure(config_.stationary, sensor_.max_range_m);
  // keep the hypothesis height-span context in sync with the stacks
  config_.hypothesis.height_span_top_m = config_.compression.z_span_max_m;
  config_.hypothesis.height_bin_m = config_.compression.z_bin_m;
}

FrameResult Pipeline::process(SphericalScan& scan) {
  FrameResult result;
  result.scan_index = scan.scan_index();
  result.t_end = scan.t_start() + sensor_.rotation_period_s;
  result.ego_end = scan.ego_pose_at(sensor_.rotation_period_s);
  {
    // velocity from the pose track tail
    const Pose2 before = scan.ego_pose_at(sensor_.rotation_period_s - 0.02);
    result.ego_velocity = (result.ego_end.position - before.position) / 0.02;
  }

  scan.clear_attributes();
  const ChannelGeometry geom = ChannelGeometry::build(scan);
  StageClock clock;

  height_grid_ = run_ground_stage(scan, geom, config_.ground);
  result.timings.ground_ms = clock.lap_ms();

  stacks_.populate(scan, geom, height_grid_, config_.compression);
  stacks_.density_filter();
  volumes_ = stacks_.condense();
  result.timings.compression_ms = clock.lap_ms();
  result.elevated_points = stacks_.elevated_point_count();
  result.volume_count = volumes_.size();

  const ClusterLabeling labeling =
      cluster(volumes_, config_.clustering, sensor_.n_channels, sensor_.azimuth_step_deg);
  result.cluster_count = labeling.clusters.size();
  result.timings.clustering_ms = clock.lap_ms();

  consistency_.update(scan, geom, height_grid_);
  consistency_.classify_points(scan, geom);
  const std::vector<PointVolumeRef> refs = stacks_.point_refs(volumes_);
  const std::vector<MotionClass> cluster_classes =
      cluster_vote(labeling, volumes_, scan, refs);
  write_cluster_labels(scan, refs, labeling);
  result.timings.motion_ms = clock.lap_ms();

  result.hypotheses = generate_hypotheses(volumes_, labeling, cluster_classes, geom, scan,
                                          config_.hypothesis);
  result.timings.hypotheses_ms = clock.lap_ms();

  tracker_.process(result.hypotheses, scan.t_start(), result.t_end);
  result.objects = tracker_.publish(scan.scan_index(), result.t_end, result.ego_end);
  result.timings.tracker_ms = clock.lap_ms();

  stationary_.update(scan, geom, height_grid_, volumes_);
  result.timings.stationary_ms = clock.lap_ms();

  return result;
}

}  // namespace percept
