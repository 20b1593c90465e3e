#include "percept/cli.hpp"

#include "percept/errors.hpp"
#include "percept/presets.hpp"
#include "percept/raycast.hpp"
#include "percept/reports.hpp"
#include "percept/scan_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace percept {

namespace fs = std::filesystem;

PipelineConfig load_config_or_default(const std::string& path) {
  if (path.empty()) {
    PipelineConfig config;
    config.validate();
    return config;
  }
  return load_config_file(path);
}

std::vector<fs::path> scan_files(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("scan_", 0) == 0 && name.find(".txt") != std::string::npos)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no scan_*.txt files in " + dir);
  return files;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

int cmd_simulate(const std::string& scenario, uint64_t seed, const std::string& out_dir,
                 int scans_override, const std::string& sensor_override,
                 const std::string& config_path) {
  PipelineConfig config = load_config_or_default(config_path);
  Preset preset = build_preset(scenario);
  const std::string profile = !sensor_override.empty() ? sensor_override
                              : config_path.empty()    ? preset.sensor_profile
                                                       : config.sensor_profile;
  const SensorConfig sensor = sensor_profile(profile);
  const int n_scans = scans_override > 0 ? scans_override : preset.default_scans;

  RaycastOptions options = config.sim;
  options.seed = seed;

  fs::create_directories(out_dir);
  GroundTruth truth;
  truth.lanes = preset.scene.lanes;
  for (int64_t k = 0; k < n_scans; ++k) {
    SimulatedScan sim = raycast_scan(preset.scene, sensor, k, options);
    char name[32];
    std::snprintf(name, sizeof(name), "scan_%05lld.txt", static_cast<long long>(k));
    write_scan_file((fs::path(out_dir) / name).string(), sim.scan);
    truth.frames.push_back(sim.truth);
  }
  write_truth_file((fs::path(out_dir) / "truth.txt").string(), truth);
  {
    auto os = open_out(fs::path(out_dir) / "config.txt");
    dump_config(os, config);
  }
  std::printf("simulate: %d scans of preset %s (sensor %s) -> %s\n", n_scans, scenario.c_str(),
              profile.c_str(), out_dir.c_str());
  return 0;
}

int cmd_run(const std::string& scan_dir, const std::string& out_dir,
            const std::string& config_path, bool debug_dumps) {
  const PipelineConfig config = load_config_or_default(config_path);
  const auto files = scan_files(scan_dir);

  fs::create_directories(out_dir);
  std::vector<ObjectFrame> object_frames;
  std::map<int64_t, std::vector<OrientedBox>> hypothesis_boxes;
  std::vector<std::pair<int64_t, StageTimings>> timing_rows;

  std::unique_ptr<Pipeline> pipeline;
  Vec2 last_ego{0.0, 0.0};
  for (const fs::path& file : files) {
    SphericalScan scan = read_scan_file(file.string());
    if (!pipeline) pipeline = std::make_unique<Pipeline>(config, scan.config());
    const uint64_t digest_before = scan.measurement_digest();
    const FrameResult frame = pipeline->process(scan);
    if (scan.measurement_digest() != digest_before)
      throw ValidationError("measured states changed during processing: " + file.string());

    ObjectFrame of;
    of.scan_index = frame.scan_index;
    of.t = frame.t_end;
    of.ego_pose = frame.ego_end;
    of.ego_velocity = frame.ego_velocity;
    of.objects = frame.objects;
    object_frames.push_back(std::move(of));

    auto& boxes = hypothesis_boxes[frame.scan_index];
    for (const BoxHypothesis& h : frame.hypotheses) boxes.push_back(h.box());
    timing_rows.emplace_back(frame.scan_index, frame.timings);
    last_ego = frame.ego_end.position;
  }

  {
    auto os = open_out(fs::path(out_dir) / "objects.csv");
    write_objects_csv(os, object_frames);
  }
  {
    auto os = open_out(fs::path(out_dir) / "hypotheses.csv");
    write_hypotheses_csv(os, hypothesis_boxes);
  }
  {
    auto os = open_out(fs::path(out_dir) / "timing.csv");
    write_timing_csv(os, timing_rows);
  }
  const FusionLayer fusion = pipeline->stationary().fuse(last_ego);
  {
    auto os = open_out(fs::path(out_dir) / "fusion.pgm");
    fusion.write_pgm(os);
  }
  {
    auto os = open_out(fs::path(out_dir) / "fusion_legend.csv");
    fusion.write_legend_csv(os);
  }
  {
    // interval map along the traveled ego path, extended ahead
    std::vector<Vec2> path;
    for (const ObjectFrame& f : object_frames) {
      if (path.empty() || (f.ego_pose.position - path.back()).norm() > 0.5)
        path.push_back(f.ego_pose.position);
    }
    if (!object_frames.empty()) {
      const Pose2& last = object_frames.back().ego_pose;
      path.push_back(last.position +
                     30.0 * Vec2(std::cos(last.yaw), std::sin(last.yaw)));
    }
    const IntervalMap map =
        extract_interval_map(fusion, path, config.interval_width_m, config.interval_length_m);
    auto os = open_out(fs::path(out_dir) / "interval.csv");
    map.write_csv(os);
  }
  if (debug_dumps) {
    {
      auto os = open_out(fs::path(out_dir) / "heightgrid.csv");
      pipeline->height_grid().dump_csv(os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "consistency.csv");
      pipeline->consistency().dump_csv(os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "volumes.csv");
      dump_volumes_csv(os, pipeline->volumes());
    }
  }
  std::printf("run: %zu scans -> %s\n", files.size(), out_dir.c_str());
  return 0;
}

EvalInput build_eval_input(const std::string& truth_path, const std::string& output_path,
                           double scan_period) {
  EvalInput input;
  input.truth = read_truth_file(truth_path);
  input.scan_period = scan_period;

  fs::path objects_path = output_path;
  if (fs::is_directory(objects_path)) objects_path /= "objects.csv";
  std::ifstream is(objects_path);
  if (!is) throw IoError("cannot open: " + objects_path.string());
  const auto frames = read_objects_csv(is, objects_path.string());
  for (const ObjectFrame& f : frames) {
    EvalInput::OutputFrame of;
    of.scan_index = f.scan_index;
    of.t = f.t;
    of.ego_pose = f.ego_pose;
    of.ego_velocity = f.ego_velocity;
    of.objects = f.objects;
    input.output.push_back(of);
  }
  const fs::path hyp_path = objects_path.parent_path() / "hypotheses.csv";
  if (fs::exists(hyp_path)) {
    std::ifstream hs(hyp_path);
    input.hypotheses = read_hypotheses_csv(hs, hyp_path.string());
  }
  return input;
}

int cmd_eval(const std::string& truth_path, const std::string& output_path,
             const std::string& scenario_name, const std::string& out_dir,
             const std::string& config_path, bool first_only) {
  PipelineConfig config = load_config_or_default(config_path);
  config.eval.lane_change_first_only = first_only;
  const Scenario scenario = scenario_from_string(scenario_name);
  const SensorConfig sensor = sensor_profile(config.sensor_profile);

  const EvalInput input = build_eval_input(truth_path, output_path, sensor.rotation_period_s);
  const EvalResult result = evaluate(scenario, input, config.eval);

  fs::create_directories(out_dir);
  {
    auto os = open_out(fs::path(out_dir) / "report.txt");
    write_report(os, scenario, result);
  }
  {
    auto os = open_out(fs::path(out_dir) / "errors_hist.csv");
    write_error_histograms_csv(os, result.mot.errors);
  }
  write_report(std::cout, scenario, result);
  return 0;
}

int cmd_bench(const std::string& scan_dir, int repeats, const std::string& config_path,
              const std::string& out_dir) {
  const PipelineConfig config = load_config_or_default(config_path);
  const auto files = scan_files(scan_dir);

  std::vector<SphericalScan> scans;
  scans.reserve(files.size());
  for (const fs::path& f : files) scans.push_back(read_scan_file(f.string()));
  std::printf("bench: %zu scans loaded, %d repeats\n", scans.size(), repeats);

  std::vector<double> totals;
  StageTimings mean{};
  std::vector<std::pair<int64_t, StageTimings>> rows;
  int processed = 0;
  for (int r = 0; r < repeats; ++r) {
    Pipeline pipeline(config, scans.front().config());
    for (SphericalScan& scan : scans) {
      scan.clear_attributes();
      const FrameResult frame = pipeline.process(scan);
      totals.push_back(frame.timings.total_ms());
      mean.ground_ms += frame.timings.ground_ms;
      mean.compression_ms += frame.timings.compression_ms;
      mean.clustering_ms += frame.timings.clustering_ms;
      mean.motion_ms += frame.timings.motion_ms;
      mean.hypotheses_ms += frame.timings.hypotheses_ms;
      mean.tracker_ms += frame.timings.tracker_ms;
      mean.stationary_ms += frame.timings.stationary_ms;
      ++processed;
      if (r == repeats - 1) rows.emplace_back(frame.scan_index, frame.timings);
    }
  }
  const double inv = 1.0 / std::max(1, processed);
  mean.ground_ms *= inv;
  mean.compression_ms *= inv;
  mean.clustering_ms *= inv;
  mean.motion_ms *= inv;
  mean.hypotheses_ms *= inv;
  mean.tracker_ms *= inv;
  mean.stationary_ms *= inv;

  std::sort(totals.begin(), totals.end());
  const double median = totals[totals.size() / 2];
  const double p90 = totals[static_cast<size_t>(totals.size() * 0.9)];
  const double worst = totals.back();

  std::printf("stage means [ms]: ground %.2f, compression %.2f, clustering %.2f, motion %.2f, "
              "hypotheses %.2f, tracker %.2f, stationary %.2f\n",
              mean.ground_ms, mean.compression_ms, mean.clustering_ms, mean.motion_ms,
              mean.hypotheses_ms, mean.tracker_ms, mean.stationary_ms);
  std::printf("block means [ms]: preprocessing %.2f, movable %.2f, stationary %.2f\n",
              mean.preprocessing_ms(), mean.movable_ms(), mean.stationary_ms);
  std::printf("availability after [ms]: %.2f / %.2f / %.2f\n", mean.preprocessing_ms(),
              mean.preprocessing_ms() + mean.movable_ms(), mean.total_ms());
  std::printf("total per scan [ms]: median %.2f, p90 %.2f, max %.2f (budget 100)\n", median, p90,
              worst);
  std::printf("budget: %s\n", median < 100.0 ? "PASS" : "FAIL");

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto os = open_out(fs::path(out_dir) / "timing.csv");
    write_timing_csv(os, rows);
  }
  return 0;
}

int cmd_plot(const std::string& report_dir, const std::string& objects_path,
             const std::string& truth_path, const std::string& out_dir) {
  const fs::path out = out_dir.empty() ? fs::path(report_dir) : fs::path(out_dir);
  fs::create_directories(out);

  const fs::path hist_path = fs::path(report_dir) / "errors_hist.csv";
  if (fs::exists(hist_path)) {
    std::ifstream is(hist_path);
    std::string line;
    std::getline(is, line);  // header
    std::map<std::string, std::vector<double>> by_state;
    int line_no = 1;
    while (std::getline(is, line)) {
      ++line_no;
      const size_t comma = line.find(',');
      if (comma == std::string::npos) continue;
      by_state[line.substr(0, comma)].push_back(
          std::stod(line.substr(comma + 1)));
    }
    for (const auto& [state, values] : by_state) {
      auto os = open_out(out / ("hist_" + state + ".svg"));
      write_histogram_svg(os, state + " (n=" + std::to_string(values.size()) + ")", values, 41);
    }
    std::printf("plot: %zu histograms -> %s\n", by_state.size(), out.string().c_str());
  }

  if (!objects_path.empty()) {
    std::ifstream is(objects_path);
    if (!is) throw IoError("cannot open: " + objects_path);
    const auto frames = read_objects_csv(is, objects_path);
    std::map<int, std::vector<Vec2>> tracks;
    for (const ObjectFrame& f : frames)
      for (const PublishedObject& o : f.objects)
        tracks[o.id].push_back(f.ego_pose.to_world(o.position));
    std::map<int, std::vector<Vec2>> refs;
    if (!truth_path.empty()) {
      const GroundTruth truth = read_truth_file(truth_path);
      for (const GroundTruthFrame& f : truth.frames)
        for (const TruthObject& o : f.objects) refs[o.id].push_back(o.position);
    }
    auto os = open_out(out / "trajectories.svg");
    write_trajectories_svg(os, tracks, refs);
    std::printf("plot: trajectories -> %s\n", (out / "trajectories.svg").string().c_str());
  }
  return 0;
}



}  // namespace percept
