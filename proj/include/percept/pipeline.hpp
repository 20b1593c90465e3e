#pragma once

#include "percept/config.hpp"

namespace percept {

struct StageTimings {
  double ground_ms{0.0};
  double compression_ms{0.0};
  double clustering_ms{0.0};
  double motion_ms{0.0};
  double hypotheses_ms{0.0};
  double tracker_ms{0.0};
  double stationary_ms{0.0};

  double preprocessing_ms() const {
    return ground_ms + compression_ms + clustering_ms + motion_ms;
  }
  double movable_ms() const { return hypotheses_ms + tracker_ms; }
  double total_ms() const { return preprocessing_ms() + movable_ms() + stationary_ms; }
};

struct FrameResult {
  int64_t scan_index{0};
  double t_end{0.0};
  Pose2 ego_end;
  Vec2 ego_velocity;
  int elevated_points{0};
  size_t volume_count{0};
  size_t cluster_count{0};
  std::vector<BoxHypothesis> hypotheses;  // locally fixed frame
  std::vector<PublishedObject> objects;   // ego frame at t_end
  StageTimings timings;
};

/// The per-scan processing chain: ground estimation and curbs, vertical
/// compression, clustering, motion classification, hypotheses and tracking,
/// stationary grid update. Attribute layers of the scan are written in
/// place; measured states stay untouched.
class Pipeline {
 public:
  Pipeline(const PipelineConfig& config, const SensorConfig& sensor);

  FrameResult process(SphericalScan& scan);

  const MultiLayerGridStack& stationary() const { return stationary_; }
  const ConsistencyGrid& consistency() const { return consistency_; }
  const Tracker& tracker() const { return tracker_; }
  const HeightGrid& height_grid() const { return height_grid_; }
  const std::vector<Volume>& volumes() const { return volumes_; }
  const PipelineConfig& config() const { return config_; }
  const SensorConfig& sensor() const { return sensor_; }

 private:
  PipelineConfig config_;
  SensorConfig sensor_;
  ConsistencyGrid consistency_;
  MultiLayerGridStack stationary_;
  StackGrid stacks_;
  Tracker tracker_;
  HeightGrid height_grid_;
  std::vector<Volume> volumes_;
};

}  // namespace percept
