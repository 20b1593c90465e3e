#include "percept/reports.hpp"

#include "percept/errors.hpp"
#include "percept/scan_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace percept {

void write_objects_csv(std::ostream& os, const std::vector<ObjectFrame>& frames) {
  for (const ObjectFrame& f : frames) {
    os << "#ego " << f.scan_index << ' ' << format_g9(f.t) << ' '
       << format_g9(f.ego_pose.position.x()) << ' ' << format_g9(f.ego_pose.position.y()) << ' '
       << format_g9(f.ego_pose.yaw) << ' ' << format_g9(f.ego_velocity.x()) << ' '
       << format_g9(f.ego_velocity.y()) << "\n";
    for (const PublishedObject& o : f.objects) {
      os << f.scan_index << ' ' << o.id << ' ' << format_g9(o.position.x()) << ' '
         << format_g9(o.position.y()) << ' ' << format_g9(o.yaw) << ' '
         << format_g9(o.velocity.x()) << ' ' << format_g9(o.velocity.y()) << ' '
         << format_g9(o.length) << ' ' << format_g9(o.width) << ' ' << format_g9(o.height) << ' '
         << to_string(o.q_length) << ' ' << to_string(o.q_width) << ' ' << to_string(o.q_height)
         << ' ' << to_string(o.rp) << ' ' << (o.imm_mode ? "imm" : "cv") << "\n";
    }
  }
}

namespace {

QualityClass quality_from_string(const std::string& s, const std::string& where) {
  if (s == "bounded") return QualityClass::kBounded;
  if (s == "single_open") return QualityClass::kSingleOpen;
  if (s == "double_open") return QualityClass::kDoubleOpen;
  throw IoError(where + ": bad quality class '" + s + "'");
}

double to_double(const std::string& tok, const std::string& where) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": malformed number '" + tok + "'");
  }
}

long to_long(const std::string& tok, const std::string& where) {
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": malformed integer '" + tok + "'");
  }
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<ObjectFrame> read_objects_csv(std::istream& is, const std::string& name) {
  std::vector<ObjectFrame> frames;
  std::string line;
  int line_no = 0;
  auto frame_for = [&frames](int64_t scan) -> ObjectFrame& {
    if (frames.empty() || frames.back().scan_index != scan) {
      ObjectFrame f;
      f.scan_index = scan;
      frames.push_back(f);
    }
    return frames.back();
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    if (line.rfind("#ego ", 0) == 0) {
      const auto tok = split_ws(line.substr(5));
      if (tok.size() != 7) throw IoError(where + ": #ego needs 7 fields");
      ObjectFrame& f = frame_for(to_long(tok[0], where));
      f.t = to_double(tok[1], where);
      f.ego_pose.position.x() = to_double(tok[2], where);
      f.ego_pose.position.y() = to_double(tok[3], where);
      f.ego_pose.yaw = to_double(tok[4], where);
      f.ego_velocity.x() = to_double(tok[5], where);
      f.ego_velocity.y() = to_double(tok[6], where);
      continue;
    }
    if (line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != 15) throw IoError(where + ": expected 15 fields");
    ObjectFrame& f = frame_for(to_long(tok[0], where));
    PublishedObject o;
    o.scan_index = f.scan_index;
    o.id = static_cast<int>(to_long(tok[1], where));
    o.position.x() = to_double(tok[2], where);
    o.position.y() = to_double(tok[3], where);
    o.yaw = to_double(tok[4], where);
    o.velocity.x() = to_double(tok[5], where);
    o.velocity.y() = to_double(tok[6], where);
    o.length = to_double(tok[7], where);
    o.width = to_double(tok[8], where);
    o.height = to_double(tok[9], where);
    o.q_length = quality_from_string(tok[10], where);
    o.q_width = quality_from_string(tok[11], where);
    o.q_height = quality_from_string(tok[12], where);
    o.rp = ref_point_from_string(tok[13]);
    o.imm_mode = tok[14] == "imm";
    f.objects.push_back(o);
  }
  return frames;
}

void write_hypotheses_csv(std::ostream& os,
                          const std::map<int64_t, std::vector<OrientedBox>>& per_scan) {
  for (const auto& [scan, boxes] : per_scan) {
    for (const OrientedBox& b : boxes) {
      os << scan << ' ' << format_g9(b.center.x()) << ' ' << format_g9(b.center.y()) << ' '
         << format_g9(b.yaw) << ' ' << format_g9(b.length) << ' ' << format_g9(b.width) << "\n";
    }
  }
}

std::map<int64_t, std::vector<OrientedBox>> read_hypotheses_csv(std::istream& is,
                                                                 const std::string& name) {
  std::map<int64_t, std::vector<OrientedBox>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const auto tok = split_ws(line);
    if (tok.size() != 6) throw IoError(where + ": expected 6 fields");
    OrientedBox b;
    b.center.x() = to_double(tok[1], where);
    b.center.y() = to_double(tok[2], where);
    b.yaw = to_double(tok[3], where);
    b.length = to_double(tok[4], where);
    b.width = to_double(tok[5], where);
    out[to_long(tok[0], where)].push_back(b);
  }
  return out;
}

void write_timing_csv(std::ostream& os,
                      const std::vector<std::pair<int64_t, StageTimings>>& rows) {
  os << "scan,ground_ms,compression_ms,clustering_ms,motion_ms,hypotheses_ms,tracker_ms,"
        "stationary_ms,preprocessing_ms,movable_ms,total_ms\n";
  char buf[64];
  auto f3 = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  for (const auto& [scan, t] : rows) {
    os << scan << ',' << f3(t.ground_ms) << ',' << f3(t.compression_ms) << ','
       << f3(t.clustering_ms) << ',' << f3(t.motion_ms) << ',' << f3(t.hypotheses_ms) << ','
       << f3(t.tracker_ms) << ',' << f3(t.stationary_ms) << ',' << f3(t.preprocessing_ms()) << ','
       << f3(t.movable_ms()) << ',' << f3(t.total_ms()) << "\n";
  }
}

void write_histogram_svg(std::ostream& os, const std::string& title,
                         const std::vector<double>& values, int bins) {
  const int width = 480, height = 280, margin = 40;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << title << "</text>\n";
  if (!values.empty() && bins > 0) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    std::vector<int> counts(bins, 0);
    for (const double v : values) {
      int b = static_cast<int>((v - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      ++counts[b];
    }
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const double bar_w = static_cast<double>(width - 2 * margin) / bins;
    for (int b = 0; b < bins; ++b) {
      const double h = static_cast<double>(counts[b]) / peak * (height - 2 * margin);
      os << "<rect x=\"" << margin + b * bar_w << "\" y=\"" << height - margin - h << "\" width=\""
         << bar_w * 0.92 << "\" height=\"" << h << "\" fill=\"#4878a8\"/>\n";
    }
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
       << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">"
       << lo << "</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
       << "\" text-anchor=\"end\" font-size=\"11\">" << hi << "</text>\n";
  } else {
    os << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
       << "\" text-anchor=\"middle\" font-size=\"12\">no samples</text>\n";
  }
  os << "</svg>\n";
}

void write_trajectories_svg(std::ostream& os, const std::map<int, std::vector<Vec2>>& tracks,
                            const std::map<int, std::vector<Vec2>>& references) {
  const int width = 640, height = 640, margin = 30;
  double min_x = 1e30, max_x = -1e30, min_y = 1e30, max_y = -1e30;
  auto grow = [&](const std::map<int, std::vector<Vec2>>& m) {
    for (const auto& [id, line] : m) {
      for (const Vec2& p : line) {
        min_x = std::min(min_x, p.x());
        max_x = std::max(max_x, p.x());
        min_y = std::min(min_y, p.y());
        max_y = std::max(max_y, p.y());
      }
    }
  };
  grow(tracks);
  grow(references);
  if (min_x > max_x) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  const double span = std::max(max_x - min_x, max_y - min_y) + 1e-9;
  auto sx = [&](double x) { return margin + (x - min_x) / span * (width - 2 * margin); };
  auto sy = [&](double y) { return height - margin - (y - min_y) / span * (height - 2 * margin); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  const char* colors[] = {"#4878a8", "#a85448", "#54a848", "#a89448", "#7848a8", "#48a8a0"};
  auto draw = [&](const std::map<int, std::vector<Vec2>>& m, bool dashed) {
    int i = 0;
    for (const auto& [id, line] : m) {
      if (line.size() < 2) continue;
      os << "<polyline fill=\"none\" stroke=\"" << colors[i % 6] << "\" stroke-width=\"1.5\"";
      if (dashed) os << " stroke-dasharray=\"5,4\"";
      os << " points=\"";
      for (const Vec2& p : line) os << sx(p.x()) << ',' << sy(p.y()) << ' ';
      os << "\"/>\n";
      ++i;
    }
  };
  draw(references, true);
  draw(tracks, false);
  os << "</svg>\n";
}

}  // namespace percept
