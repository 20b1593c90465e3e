#pragma once

#include "percept/clustering.hpp"
#include "percept/compression.hpp"
#include "percept/eval.hpp"
#include "percept/ground.hpp"
#include "percept/motion.hpp"
#include "percept/raycast.hpp"
#include "percept/stationary.hpp"
#include "percept/tracker.hpp"

#include <iosfwd>
#include <string>

namespace percept {

/// Every tunable threshold of the pipeline, hierarchically keyed in a flat
/// `section.key = value` text format. Unknown keys are rejected and all
/// values are validated on load.
struct PipelineConfig {
  std::string sensor_profile{"16"};
  RaycastOptions sim;
  GroundParams ground;
  CompressionParams compression;
  ClusterParams clustering;
  MotionParams motion;
  StationaryParams stationary;
  HypothesisParams hypothesis;
  TrackerParams tracker;
  EvalParams eval;
  double interval_width_m{3.5};
  double interval_length_m{2.0};

  void validate() const;
};

void apply_config_text(PipelineConfig& config, std::istream& is, const std::string& name);
PipelineConfig load_config_file(const std::string& path);
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
void dump_config(std::ostream& os, const PipelineConfig& config);

}  // namespace percept
