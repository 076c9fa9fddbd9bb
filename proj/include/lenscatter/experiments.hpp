#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lenscatter {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSubstepOrder = "nonlinear_then_linear";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment run. Fields map 1:1 onto config-file keys and CLI flags;
// sigma = 0 means "the experiment's built-in sigma sweep" where one exists.
struct RunConfig {
  std::string experiment;
  int d = 1;
  double sigma = 2.0;
  int sign = +1;
  int em = 256;           // mode / node count M
  double tau = 1e-2;
  std::uint64_t seed = 12345;
  int samples = 1;
  double amplitude = 10.0;
  std::string out = ".";
  bool full_scale = false;
  int stride = 0;         // observable recording stride; 0 = runner default
  int j = 1;
  double theta = 0.0;
  std::string stamp;      // output-name stamp; empty = current UTC time
};

// Desk-scale defaults per experiment; full_scale bumps the heavy runs to the
// full reproduction resolution. Throws ConfigError on unknown names.
RunConfig default_config(const std::string& experiment, bool full_scale);

// Set one field from its key=value form. Throws ConfigError on unknown keys
// or unparsable values.
void apply_key_value(RunConfig& cfg, const std::string& key,
                     const std::string& value);

// Flat key=value lines ('#' comments), a JSON object of the same keys, or a
// previously written .meta.json (the "config" object is used). Returned map
// preserves only recognized keys; throws ConfigError otherwise.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path);

// Canonical JSON of the config, embedded in every metadata sidecar.
std::string config_json(const RunConfig& cfg);

struct RunResult {
  int exit_code = 0;                 // 0 ok, 3 numerical abort
  std::vector<std::string> outputs;  // files written, CSV/JSON first
  std::string message;               // one-line summary for the console
};

// Dispatch on cfg.experiment; validates config (throws ConfigError) and
// writes outputs plus a .meta.json sidecar into cfg.out.
RunResult run_experiment(const RunConfig& cfg);

RunResult run_visualize(const RunConfig& cfg);
RunResult run_conservation(const RunConfig& cfg);
RunResult run_rotating_point(const RunConfig& cfg);
RunResult run_rotating_convergence(const RunConfig& cfg);
RunResult run_supercritical_search(const RunConfig& cfg);
RunResult run_long_range(const RunConfig& cfg);
RunResult run_sigma_blowup(const RunConfig& cfg);
RunResult run_j_growth(const RunConfig& cfg);
RunResult run_focusing_soliton(const RunConfig& cfg);
RunResult run_continuity_sigma(const RunConfig& cfg);

const std::vector<std::string>& experiment_names();

}  // namespace lenscatter
