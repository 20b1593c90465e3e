#pragma once

#include <cstdint>
#include <string>

namespace percept {

/// Command entry points shared by the binary and the acceptance suite.
/// Inputs come from files; outputs land in the given directories. Errors
/// raise ConfigError / IoError / ValidationError.
int cmd_simulate(const std::string& scenario, uint64_t seed, const std::string& out_dir,
                 int scans_override, const std::string& sensor_override,
                 const std::string& config_path);
int cmd_run(const std::string& scan_dir, const std::string& out_dir,
            const std::string& config_path, bool debug_dumps);
int cmd_eval(const std::string& truth_path, const std::string& output_path,
             const std::string& scenario_name, const std::string& out_dir,
             const std::string& config_path, bool first_only);
int cmd_bench(const std::string& scan_dir, int repeats, const std::string& config_path,
              const std::string& out_dir);
int cmd_plot(const std::string& report_dir, const std::string& objects_path,
             const std::string& truth_path, const std::string& out_dir);

}  // namespace percept
