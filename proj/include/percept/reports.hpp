#pragma once

#include "percept/eval.hpp"
#include "percept/pipeline.hpp"

#include <iosfwd>
#include <map>

namespace percept {

struct ObjectFrame {
  int64_t scan_index{0};
  double t{0.0};
  Pose2 ego_pose;
  Vec2 ego_velocity;
  std::vector<PublishedObject> objects;
};

/// Published-object CSV: `#ego scan t x y yaw vx vy` per frame plus
/// `scan id x y yaw vx vy L W H qL qW qH rp mode` rows (ego frame).
void write_objects_csv(std::ostream& os, const std::vector<ObjectFrame>& frames);
std::vector<ObjectFrame> read_objects_csv(std::istream& is, const std::string& name);

/// Hypothesis boxes per scan in the locally fixed frame:
/// `scan cx cy yaw length width`.
void write_hypotheses_csv(std::ostream& os,
                          const std::map<int64_t, std::vector<OrientedBox>>& per_scan);
std::map<int64_t, std::vector<OrientedBox>> read_hypotheses_csv(std::istream& is,
                                                                 const std::string& name);

void write_timing_csv(std::ostream& os,
                      const std::vector<std::pair<int64_t, StageTimings>>& rows);

/// Simple vector-graphics emitters for the report figures.
void write_histogram_svg(std::ostream& os, const std::string& title,
                         const std::vector<double>& values, int bins);
void write_trajectories_svg(std::ostream& os,
                            const std::map<int, std::vector<Vec2>>& tracks,
                            const std::map<int, std::vector<Vec2>>& references);

}  // namespace percept
