#include "percept/scan_io.hpp"

#include "percept/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace percept {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": malformed number '" + tok + "'");
  }
}

long parse_long(const std::string& tok, const std::string& where) {
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": malformed integer '" + tok + "'");
  }
}

std::string loc(const std::string& name, int line_no) {
  return name + ":" + std::to_string(line_no);
}

}  // namespace

void write_scan(std::ostream& os, const SphericalScan& scan) {
  const SensorConfig& c = scan.config();
  os << "#sensor n_layers=" << c.n_layers << "\n";
  os << "#sensor n_channels=" << c.n_channels << "\n";
  os << "#sensor azimuth_step_deg=" << format_g9(c.azimuth_step_deg) << "\n";
  os << "#sensor elevation_deg=";
  for (size_t i = 0; i < c.elevation_deg.size(); ++i) {
    if (i) os << ',';
    os << format_g9(c.elevation_deg[i]);
  }
  os << "\n";
  os << "#sensor n_slices=" << c.n_slices << "\n";
  os << "#sensor rotation_period_s=" << format_g9(c.rotation_period_s) << "\n";
  os << "#sensor mount_height_m=" << format_g9(c.mount_height_m) << "\n";
  os << "#sensor max_range_m=" << format_g9(c.max_range_m) << "\n";
  os << "#sensor scan_index=" << scan.scan_index() << "\n";
  os << "#sensor t_start=" << format_g9(scan.t_start()) << "\n";
  for (const TimedPose& tp : scan.ego_track().samples()) {
    os << "#pose " << format_g9(tp.t) << ' ' << format_g9(tp.pose.position.x()) << ' '
       << format_g9(tp.pose.position.y()) << ' ' << format_g9(tp.pose.yaw) << "\n";
  }
  for (size_t i = 0; i < scan.cell_count(); ++i) {
    const Measurement& m = scan.at(i);
    if (!m.valid) continue;
    const LogicalPosition p = scan.position_at(i);
    os << scan.scan_index() << ' ' << p.layer << ' ' << p.channel << ' ' << p.slice << ' '
       << format_g9(m.range) << ' ' << format_g9(m.azimuth_deg) << ' '
       << format_g9(m.elevation_deg) << ' ' << format_g9(m.intensity) << ' '
       << format_g9(m.t_offset) << "\n";
  }
}

void write_scan_file(const std::string& path, const SphericalScan& scan) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_scan(os, scan);
  if (!os) throw IoError("write failed: " + path);
}

SphericalScan read_scan(std::istream& is, const std::string& name) {
  std::map<std::string, std::string> sensor_kv;
  std::vector<TimedPose> poses;
  struct Record {
    LogicalPosition p;
    Measurement m;
  };
  std::vector<Record> records;
  int64_t scan_index = 0;
  double t_start = 0.0;

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#sensor ", 0) == 0) {
      const std::string body = line.substr(8);
      const size_t eq = body.find('=');
      if (eq == std::string::npos) throw IoError(loc(name, line_no) + ": bad #sensor header");
      sensor_kv[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (line.rfind("#pose ", 0) == 0) {
      const auto tok = split_ws(line.substr(6));
      if (tok.size() != 4) throw IoError(loc(name, line_no) + ": #pose needs t x y yaw");
      TimedPose tp;
      tp.t = parse_double(tok[0], loc(name, line_no));
      tp.pose.position.x() = parse_double(tok[1], loc(name, line_no));
      tp.pose.position.y() = parse_double(tok[2], loc(name, line_no));
      tp.pose.yaw = parse_double(tok[3], loc(name, line_no));
      poses.push_back(tp);
      continue;
    }
    if (line[0] == '#') continue;  // unrecognized comment
    const auto tok = split_ws(line);
    if (tok.size() != 9)
      throw IoError(loc(name, line_no) + ": expected 9 fields, got " + std::to_string(tok.size()));
    Record r;
    scan_index = parse_long(tok[0], loc(name, line_no));
    r.p.layer = static_cast<int>(parse_long(tok[1], loc(name, line_no)));
    r.p.channel = static_cast<int>(parse_long(tok[2], loc(name, line_no)));
    r.p.slice = static_cast<int>(parse_long(tok[3], loc(name, line_no)));
    r.m.range = parse_double(tok[4], loc(name, line_no));
    r.m.azimuth_deg = parse_double(tok[5], loc(name, line_no));
    r.m.elevation_deg = parse_double(tok[6], loc(name, line_no));
    r.m.intensity = parse_double(tok[7], loc(name, line_no));
    r.m.t_offset = parse_double(tok[8], loc(name, line_no));
    r.m.target_index = static_cast<uint8_t>(r.p.slice);
    r.m.valid = true;
    records.push_back(r);
  }

  SensorConfig cfg;
  auto need = [&](const char* key) -> std::string {
    auto it = sensor_kv.find(key);
    if (it == sensor_kv.end()) throw IoError(name + ": missing #sensor " + key);
    return it->second;
  };
  cfg.n_layers = static_cast<int>(parse_long(need("n_layers"), name));
  cfg.n_channels = static_cast<int>(parse_long(need("n_channels"), name));
  cfg.azimuth_step_deg = parse_double(need("azimuth_step_deg"), name);
  cfg.n_slices = static_cast<int>(parse_long(need("n_slices"), name));
  cfg.rotation_period_s = parse_double(need("rotation_period_s"), name);
  cfg.mount_height_m = parse_double(need("mount_height_m"), name);
  cfg.max_range_m = parse_double(need("max_range_m"), name);
  {
    std::stringstream ss(need("elevation_deg"));
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.elevation_deg.push_back(parse_double(tok, name));
  }
  if (sensor_kv.count("scan_index")) scan_index = parse_long(sensor_kv["scan_index"], name);
  if (sensor_kv.count("t_start")) t_start = parse_double(sensor_kv["t_start"], name);

  SphericalScan scan(cfg, scan_index, t_start);
  for (const TimedPose& tp : poses) scan.ego_track().add(tp.t, tp.pose);
  for (const auto& r : records) {
    if (r.p.layer < 0 || r.p.layer >= cfg.n_layers || r.p.channel < 0 ||
        r.p.channel >= cfg.n_channels || r.p.slice < 0 || r.p.slice >= cfg.n_slices)
      throw IoError(name + ": record position out of range");
    scan.insert(r.p, r.m);
  }
  return scan;
}

SphericalScan read_scan_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_scan(is, path);
}

void write_truth(std::ostream& os, const GroundTruth& truth) {
  for (const Lane& lane : truth.lanes) {
    os << "#lane " << lane.id << ' ' << format_g9(lane.width);
    for (const Vec2& p : lane.centerline)
      os << ' ' << format_g9(p.x()) << ' ' << format_g9(p.y());
    os << "\n";
  }
  for (const GroundTruthFrame& f : truth.frames) {
    os << "#ego " << f.scan_index << ' ' << format_g9(f.t) << ' '
       << format_g9(f.ego_pose.position.x()) << ' ' << format_g9(f.ego_pose.position.y()) << ' '
       << format_g9(f.ego_pose.yaw) << ' ' << format_g9(f.ego_velocity.x()) << ' '
       << format_g9(f.ego_velocity.y()) << "\n";
    for (const TruthObject& o : f.objects) {
      os << f.scan_index << ' ' << o.id << ' ' << format_g9(o.position.x()) << ' '
         << format_g9(o.position.y()) << ' ' << format_g9(o.yaw) << ' ' << format_g9(o.length)
         << ' ' << format_g9(o.width) << ' ' << format_g9(o.height) << ' '
         << format_g9(o.velocity.x()) << ' ' << format_g9(o.velocity.y()) << "\n";
    }
  }
}

void write_truth_file(const std::string& path, const GroundTruth& truth) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_truth(os, truth);
  if (!os) throw IoError("write failed: " + path);
}

GroundTruth read_truth(std::istream& is, const std::string& name) {
  GroundTruth truth;
  std::string line;
  int line_no = 0;
  auto frame_for = [&truth](int64_t scan_index) -> GroundTruthFrame& {
    if (truth.frames.empty() || truth.frames.back().scan_index != scan_index) {
      GroundTruthFrame f;
      f.scan_index = scan_index;
      truth.frames.push_back(f);
    }
    return truth.frames.back();
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#lane ", 0) == 0) {
      const auto tok = split_ws(line.substr(6));
      if (tok.size() < 6 || (tok.size() - 2) % 2 != 0)
        throw IoError(loc(name, line_no) + ": #lane needs id width and >=2 points");
      Lane lane;
      lane.id = static_cast<int>(parse_long(tok[0], loc(name, line_no)));
      lane.width = parse_double(tok[1], loc(name, line_no));
      for (size_t i = 2; i + 1 < tok.size(); i += 2)
        lane.centerline.emplace_back(parse_double(tok[i], loc(name, line_no)),
                                     parse_double(tok[i + 1], loc(name, line_no)));
      truth.lanes.push_back(lane);
      continue;
    }
    if (line.rfind("#ego ", 0) == 0) {
      const auto tok = split_ws(line.substr(5));
      if (tok.size() != 7) throw IoError(loc(name, line_no) + ": #ego needs 7 fields");
      GroundTruthFrame& f = frame_for(parse_long(tok[0], loc(name, line_no)));
      f.t = parse_double(tok[1], loc(name, line_no));
      f.ego_pose.position.x() = parse_double(tok[2], loc(name, line_no));
      f.ego_pose.position.y() = parse_double(tok[3], loc(name, line_no));
      f.ego_pose.yaw = parse_double(tok[4], loc(name, line_no));
      f.ego_velocity.x() = parse_double(tok[5], loc(name, line_no));
      f.ego_velocity.y() = parse_double(tok[6], loc(name, line_no));
      continue;
    }
    if (line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != 10)
      throw IoError(loc(name, line_no) + ": expected 10 fields, got " + std::to_string(tok.size()));
    GroundTruthFrame& f = frame_for(parse_long(tok[0], loc(name, line_no)));
    TruthObject o;
    o.id = static_cast<int>(parse_long(tok[1], loc(name, line_no)));
    o.position.x() = parse_double(tok[2], loc(name, line_no));
    o.position.y() = parse_double(tok[3], loc(name, line_no));
    o.yaw = parse_double(tok[4], loc(name, line_no));
    o.length = parse_double(tok[5], loc(name, line_no));
    o.width = parse_double(tok[6], loc(name, line_no));
    o.height = parse_double(tok[7], loc(name, line_no));
    o.velocity.x() = parse_double(tok[8], loc(name, line_no));
    o.velocity.y() = parse_double(tok[9], loc(name, line_no));
    f.objects.push_back(o);
  }
  return truth;
}

GroundTruth read_truth_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_truth(is, path);
}

}  // namespace percept
