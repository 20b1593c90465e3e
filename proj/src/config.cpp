#include "percept/config.hpp"

#include "percept/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace percept {

namespace {

struct Entry {
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::vector<Entry> registry() {
  std::vector<Entry> entries;
  auto num = [&entries](const char* key, auto member) {
    entries.push_back({key,
                       [member](const PipelineConfig& c) { return fmt(c.*member); },
                       [member, key = std::string(key)](PipelineConfig& c, const std::string& v) {
                         c.*member = parse_double(key, v);
                       }});
  };
  auto sub = [&entries](const char* key, auto section, auto member) {
    entries.push_back(
        {key,
         [section, member](const PipelineConfig& c) { return fmt(c.*section.*member); },
         [section, member, key = std::string(key)](PipelineConfig& c, const std::string& v) {
           c.*section.*member = parse_double(key, v);
         }});
  };
  auto sub_int = [&entries](const char* key, auto section, auto member) {
    entries.push_back(
        {key,
         [section, member](const PipelineConfig& c) { return std::to_string(c.*section.*member); },
         [section, member, key = std::string(key)](PipelineConfig& c, const std::string& v) {
           c.*section.*member = parse_int(key, v);
         }});
  };

  entries.push_back({"sensor.profile",
                     [](const PipelineConfig& c) { return c.sensor_profile; },
                     [](PipelineConfig& c, const std::string& v) {
                       if (v != "16" && v != "64")
                         throw ConfigError("config: sensor.profile must be 16 or 64");
                       c.sensor_profile = v;
                     }});

  sub("sim.range_noise_sigma", &PipelineConfig::sim, &RaycastOptions::range_noise_sigma);
  sub("sim.min_range", &PipelineConfig::sim, &RaycastOptions::min_range);
  sub("sim.echo_separation", &PipelineConfig::sim, &RaycastOptions::echo_separation);

  sub("ground.cell_size", &PipelineConfig::ground, &GroundParams::cell_size_m);
  sub("ground.slope_max_deg", &PipelineConfig::ground, &GroundParams::slope_max_deg);
  sub("ground.seed_tolerance", &PipelineConfig::ground, &GroundParams::seed_tolerance_m);
  sub("ground.dz_ground", &PipelineConfig::ground, &GroundParams::dz_ground_m);
  sub_int("ground.fill_iterations", &PipelineConfig::ground, &GroundParams::fill_iterations);
  sub("ground.curb_height_min", &PipelineConfig::ground, &GroundParams::curb_height_min_m);
  sub("ground.curb_height_max", &PipelineConfig::ground, &GroundParams::curb_height_max_m);
  sub("ground.curb_joint_angle_min_deg", &PipelineConfig::ground,
      &GroundParams::curb_joint_angle_min_deg);
  sub("ground.curb_density_min", &PipelineConfig::ground, &GroundParams::curb_density_min_per_m);
  sub("ground.split_merge_dist", &PipelineConfig::ground, &GroundParams::split_merge_dist_m);

  sub("compression.radial_step", &PipelineConfig::compression, &CompressionParams::radial_step_m);
  sub("compression.z_bin", &PipelineConfig::compression, &CompressionParams::z_bin_m);
  sub("compression.z_span_min", &PipelineConfig::compression, &CompressionParams::z_span_min_m);
  sub("compression.z_span_max", &PipelineConfig::compression, &CompressionParams::z_span_max_m);
  sub_int("compression.density_window", &PipelineConfig::compression,
          &CompressionParams::density_window);
  sub_int("compression.density_min_count", &PipelineConfig::compression,
          &CompressionParams::density_min_count);

  sub("clustering.noise_floor", &PipelineConfig::clustering, &ClusterParams::noise_floor_m);
  sub("clustering.breakpoint_angle_deg", &PipelineConfig::clustering,
      &ClusterParams::breakpoint_angle_deg);
  sub("clustering.height_gap_max", &PipelineConfig::clustering, &ClusterParams::height_gap_max_m);
  sub_int("clustering.channel_lookback", &PipelineConfig::clustering,
          &ClusterParams::channel_lookback);

  sub("motion.cell_size", &PipelineConfig::motion, &MotionParams::cell_size_m);
  sub_int("motion.confirm_hits", &PipelineConfig::motion, &MotionParams::confirm_hits);
  sub_int("motion.free_hits", &PipelineConfig::motion, &MotionParams::free_hits);
  sub("motion.window", &PipelineConfig::motion, &MotionParams::window_m);
  sub("motion.block_clearance", &PipelineConfig::motion, &MotionParams::block_clearance_m);

  sub("stationary.cell_size", &PipelineConfig::stationary, &StationaryParams::cell_size_m);
  sub("stationary.window", &PipelineConfig::stationary, &StationaryParams::window_m);
  sub("stationary.logodds_hit", &PipelineConfig::stationary, &StationaryParams::logodds_hit);
  sub("stationary.logodds_free", &PipelineConfig::stationary, &StationaryParams::logodds_free);
  sub("stationary.logodds_clamp", &PipelineConfig::stationary, &StationaryParams::logodds_clamp);
  sub("stationary.tau_existent", &PipelineConfig::stationary, &StationaryParams::tau_existent);
  sub("stationary.tau_nonexistent", &PipelineConfig::stationary,
      &StationaryParams::tau_nonexistent);
  sub("stationary.curb_weight_scale", &PipelineConfig::stationary,
      &StationaryParams::curb_weight_scale);
  sub_int("stationary.visibility_horizon", &PipelineConfig::stationary,
          &StationaryParams::visibility_horizon_scans);
  sub("stationary.marking_intensity_min", &PipelineConfig::stationary,
      &StationaryParams::marking_intensity_min);
  sub("stationary.underrun_clearance", &PipelineConfig::stationary,
      &StationaryParams::underrun_clearance_m);
  sub("stationary.visibility_interp_gap", &PipelineConfig::stationary,
      &StationaryParams::visibility_interp_gap_m);

  sub("hypothesis.edge_support_dist", &PipelineConfig::hypothesis,
      &HypothesisParams::edge_support_dist_m);
  sub_int("hypothesis.edge_support_min_points", &PipelineConfig::hypothesis,
          &HypothesisParams::edge_support_min_points);
  sub("hypothesis.min_edge_length", &PipelineConfig::hypothesis,
      &HypothesisParams::min_edge_length_m);
  sub("hypothesis.min_dim", &PipelineConfig::hypothesis, &HypothesisParams::min_dim_m);
  sub("hypothesis.occlusion_margin", &PipelineConfig::hypothesis,
      &HypothesisParams::occlusion_margin_m);
  sub("hypothesis.pos_sigma", &PipelineConfig::hypothesis, &HypothesisParams::pos_sigma_m);
  sub("hypothesis.yaw_sigma_deg", &PipelineConfig::hypothesis, &HypothesisParams::yaw_sigma_deg);
  sub("hypothesis.dim_sigma", &PipelineConfig::hypothesis, &HypothesisParams::dim_sigma_m);

  entries.push_back({"tracker.accel_noise",
                     [](const PipelineConfig& c) { return fmt(c.tracker.filter.accel_noise); },
                     [](PipelineConfig& c, const std::string& v) {
                       c.tracker.filter.accel_noise = parse_double("tracker.accel_noise", v);
                     }});
  entries.push_back({"tracker.yaw_accel_noise",
                     [](const PipelineConfig& c) { return fmt(c.tracker.filter.yaw_accel_noise); },
                     [](PipelineConfig& c, const std::string& v) {
                       c.tracker.filter.yaw_accel_noise =
                           parse_double("tracker.yaw_accel_noise", v);
                     }});
  entries.push_back({"tracker.imm_stay_prob",
                     [](const PipelineConfig& c) { return fmt(c.tracker.filter.imm_stay_prob); },
                     [](PipelineConfig& c, const std::string& v) {
                       c.tracker.filter.imm_stay_prob = parse_double("tracker.imm_stay_prob", v);
                     }});
  entries.push_back({"tracker.pos_meas_sigma",
                     [](const PipelineConfig& c) { return fmt(c.tracker.filter.pos_meas_sigma); },
                     [](PipelineConfig& c, const std::string& v) {
                       c.tracker.filter.pos_meas_sigma = parse_double("tracker.pos_meas_sigma", v);
                     }});
  entries.push_back(
      {"tracker.yaw_meas_sigma_deg",
       [](const PipelineConfig& c) { return fmt(rad_to_deg(c.tracker.filter.yaw_meas_sigma)); },
       [](PipelineConfig& c, const std::string& v) {
         c.tracker.filter.yaw_meas_sigma = deg_to_rad(parse_double("tracker.yaw_meas_sigma_deg", v));
       }});
  entries.push_back({"tracker.init_speed_sigma",
                     [](const PipelineConfig& c) { return fmt(c.tracker.filter.init_speed_sigma); },
                     [](PipelineConfig& c, const std::string& v) {
                       c.tracker.filter.init_speed_sigma =
                           parse_double("tracker.init_speed_sigma", v);
                     }});
  sub("tracker.dim_blend", &PipelineConfig::tracker, &TrackerParams::dim_blend);
  sub("tracker.dim_sigma", &PipelineConfig::tracker, &TrackerParams::dim_sigma_m);
  sub("tracker.ttl", &PipelineConfig::tracker, &TrackerParams::ttl_s);
  sub_int("tracker.publish_min_updates", &PipelineConfig::tracker,
          &TrackerParams::publish_min_updates);
  sub("tracker.publish_min_displacement", &PipelineConfig::tracker,
      &TrackerParams::publish_min_displacement_m);
  sub("tracker.vehicle_length_min", &PipelineConfig::tracker, &TrackerParams::vehicle_length_min_m);
  sub("tracker.vehicle_length_max", &PipelineConfig::tracker, &TrackerParams::vehicle_length_max_m);
  sub("tracker.vehicle_width_min", &PipelineConfig::tracker, &TrackerParams::vehicle_width_min_m);
  sub("tracker.vehicle_width_max", &PipelineConfig::tracker, &TrackerParams::vehicle_width_max_m);
  sub("tracker.vehicle_speed_max", &PipelineConfig::tracker, &TrackerParams::vehicle_speed_max);
  sub("tracker.heading_speed_min", &PipelineConfig::tracker, &TrackerParams::heading_speed_min);

  sub("eval.horizon", &PipelineConfig::eval, &EvalParams::horizon_m);
  sub_int("eval.lane_change_per_roi", &PipelineConfig::eval, &EvalParams::lane_change_per_roi);
  sub("eval.overlap_epsilon", &PipelineConfig::eval, &EvalParams::overlap_epsilon);
  sub("eval.warmup", &PipelineConfig::eval, &EvalParams::warmup_s);
  sub("eval.idm_time_headway", &PipelineConfig::eval, &EvalParams::idm_time_headway);
  sub("eval.idm_accel", &PipelineConfig::eval, &EvalParams::idm_accel);
  sub("eval.idm_decel", &PipelineConfig::eval, &EvalParams::idm_decel);
  sub("eval.idm_min_gap", &PipelineConfig::eval, &EvalParams::idm_min_gap);
  sub("eval.idm_desired_speed", &PipelineConfig::eval, &EvalParams::idm_desired_speed);

  num("interval.width", &PipelineConfig::interval_width_m);
  num("interval.length", &PipelineConfig::interval_length_m);
  return entries;
}

}  // namespace

void PipelineConfig::validate() const {
  const SensorConfig sensor = sensor_profile == "64" ? sensor_profile_64() : sensor_profile_16();
  ground.validate();
  compression.validate();
  clustering.validate(sensor.azimuth_step_deg);
  motion.validate();
  stationary.validate();
  tracker.validate();
  if (interval_width_m <= 0.0 || interval_length_m <= 0.0)
    throw ValidationError("config: interval extents must be positive");
  if (eval.warmup_s < 0.0) throw ValidationError("config: eval warmup must be >= 0");
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  static const std::vector<Entry> entries = registry();
  for (const Entry& e : entries) {
    if (e.key == key) {
      e.set(config, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void apply_config_text(PipelineConfig& config, std::istream& is, const std::string& name) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  PipelineConfig config;
  apply_config_text(config, is, path);
  return config;
}

void dump_config(std::ostream& os, const PipelineConfig& config) {
  static const std::vector<Entry> entries = registry();
  for (const Entry& e : entries) os << e.key << " = " << e.get(config) << "\n";
}

}  // namespace percept
