#include "CLI11.hpp"

#include "percept/cli.hpp"
#include "percept/errors.hpp"

#include <iostream>

using namespace percept;

int main(int argc, char** argv) {
  CLI::App app{"desk-scale 3D perception pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scenario, scan_dir, truth_path, output_path, sensor_override;
  std::string objects_path, report_dir;
  uint64_t seed = 1;
  int scans = 0, repeats = 3;
  bool debug_dumps = false, first_only = false;

  auto* sim = app.add_subcommand("simulate", "synthesize scans and ground truth for a preset");
  sim->add_option("--scenario", scenario, "preset name")->required();
  sim->add_option("--seed", seed, "rng seed");
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--scans", scans, "override scan count");
  sim->add_option("--sensor", sensor_override, "sensor profile (16 or 64)");
  sim->add_option("--config", config_path, "config file");

  auto* run = app.add_subcommand("run", "process a directory of scan files");
  run->add_option("--scans", scan_dir, "scan directory")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--config", config_path, "config file");
  run->add_flag("--debug", debug_dumps, "write debug grid dumps");

  auto* ev = app.add_subcommand("eval", "closed-loop evaluation against ground truth");
  ev->add_option("--truth", truth_path, "truth file")->required();
  ev->add_option("--output", output_path, "run output directory or objects.csv")->required();
  ev->add_option("--scenario", scenario, "acc, lane_change or left_turn")->required();
  ev->add_option("--out", out_dir, "report directory")->required();
  ev->add_option("--config", config_path, "config file");
  ev->add_flag("--first-only", first_only, "lane change: first object per region");

  auto* bench = app.add_subcommand("bench", "latency percentiles against the 100 ms budget");
  bench->add_option("--scans", scan_dir, "scan directory")->required();
  bench->add_option("--repeats", repeats, "repeat count");
  bench->add_option("--config", config_path, "config file");
  bench->add_option("--out", out_dir, "optional timing csv directory");

  auto* plot = app.add_subcommand("plot", "histogram and trajectory figures");
  plot->add_option("--report", report_dir, "eval report directory")->required();
  plot->add_option("--objects", objects_path, "objects.csv for trajectories");
  plot->add_option("--truth", truth_path, "truth file for reference trajectories");
  plot->add_option("--out", out_dir, "figure directory (default: report dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(scenario, seed, out_dir, scans, sensor_override, config_path);
    if (run->parsed()) return cmd_run(scan_dir, out_dir, config_path, debug_dumps);
    if (ev->parsed())
      return cmd_eval(truth_path, output_path, scenario, out_dir, config_path, first_only);
    if (bench->parsed()) return cmd_bench(scan_dir, repeats, config_path, out_dir);
    if (plot->parsed()) return cmd_plot(report_dir, objects_path, truth_path, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
