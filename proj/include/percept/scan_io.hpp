#pragma once

#include "percept/scan.hpp"
#include "percept/scene.hpp"

#include <iosfwd>
#include <string>

namespace percept {

/// Line-oriented scan file: `#sensor key=value` headers, `#pose t x y yaw`
/// samples, then one record `scan_index layer channel slice r phi theta
/// intensity t_offset` per populated cell. Values carry 9 significant digits
/// and round-trip bit-exactly at that precision.
void write_scan(std::ostream& os, const SphericalScan& scan);
void write_scan_file(const std::string& path, const SphericalScan& scan);
SphericalScan read_scan(std::istream& is, const std::string& name = "<stream>");
SphericalScan read_scan_file(const std::string& path);

/// Truth file: `#lane id width x0 y0 x1 y1 ...` polylines, `#ego scan t x y
/// yaw vx vy` per frame, and `scan_index id x y yaw L W H vx vy` per actor.
void write_truth(std::ostream& os, const GroundTruth& truth);
void write_truth_file(const std::string& path, const GroundTruth& truth);
GroundTruth read_truth(std::istream& is, const std::string& name = "<stream>");
GroundTruth read_truth_file(const std::string& path);

/// Formats a double with 9 significant digits (the file precision).
std::string format_g9(double v);

}  // namespace percept
