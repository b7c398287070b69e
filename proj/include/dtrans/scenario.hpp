#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtrans/bathymetry.hpp"
#include "dtrans/engine.hpp"
#include "dtrans/perfmodel.hpp"

namespace dtrans {

struct ScenarioConfig {
  // [run]
  std::string kernel = "heat5";  // heat5 | heat9 | swe
  std::string method = "translation";
  int ghost_steps = 2;
  long steps = 100;
  double dt = 0.0;  // swe seconds; 0 picks the largest dt with CFL <= cfl_target
  double alpha = 0.1, alpha_diag = 0.05;
  unsigned seed = 1;
  // [geometry]
  int workers_x = 2, workers_y = 2, n = 32;
  // [link]
  double latency = 1e-6;       // s
  double bandwidth = 37.5e9;   // bytes/s per direction: 3 x 100 Gbps
  // [timing]
  bool timing = true;
  bool numerics = true;
  double clock_hz = 0.75e9;
  int telemetry_every = 1;
  // [output]
  std::string out_dir = "out";
  long snapshot_every = 0;
  bool snapshot_csv = false;
  // [swe]
  std::string bathymetry;  // .asc or .bin; empty uses the synthetic raster
  double cfl_target = 0.5;
  double cfl_max = 0.5;
  bool hump = true;
  double hump_lat = 30.0, hump_lon = -140.0;
  double hump_area = 3.0e10, hump_peak = 200.0;

  // Throws ConfigError with a diagnostic. Does not look at SWE numbers; see
  // run_scenario for the CFL check.
  void validate() const;
  MethodConfig method_config() const;
  int radius() const;
};

// Parameter names accepted by set_param, without section prefix.
const std::vector<std::string> &scenario_keys();
// Accepts "key" or "section.key". Throws ConfigError for unknown keys or
// unparsable values.
void set_param(ScenarioConfig &cfg, const std::string &key, const std::string &value);
std::string get_param(const ScenarioConfig &cfg, const std::string &key);

// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
// Returns every entry as "section.key" -> raw value, in file order.
std::vector<std::pair<std::string, std::string>> read_ini(const std::string &path);
// Applies every entry outside [sweep] to cfg.
void apply_ini(ScenarioConfig &cfg, const std::vector<std::pair<std::string, std::string>> &entries);

struct ScenarioResult {
  RunResult run;
  ClusterPrediction predicted;
  long flops_per_step = 0;  // per point, all substeps
  double dt = 0.0;
  double cfl = 0.0;
  std::optional<HumpReport> hump;
  std::vector<std::string> snapshots;  // base paths written
};

// Builds the initial condition, runs it and, when write_files is set, writes
// metrics.csv, workers.csv, links.csv, telemetry.csv and snapshots under
// out_dir.
ScenarioResult run_scenario(const ScenarioConfig &cfg, bool write_files = true);

// SWE domain for the config: synthetic or loaded raster, clamped and
// resampled to the run grid.
SweDomain scenario_domain(const ScenarioConfig &cfg, double dt);
// Largest gravity-wave CFL number over water points.
double domain_cfl(const SweDomain &d);

std::string metrics_header();
std::string metrics_row(const ScenarioConfig &cfg, const ScenarioResult &res);

struct SweepSummary {
  long cells = 0, executed = 0, skipped = 0;
  std::string metrics_path;
};

// Cartesian product of `axes` (key -> values) over `base`. Each cell writes
// <out_dir>/cells/<key=value_...>/metrics.csv; cells whose file already
// exists are skipped. The combined table goes to <out_dir>/sweep.csv in cell order.
SweepSummary run_sweep(const ScenarioConfig &base, const std::vector<std::pair<std::string, std::vector<std::string>>> &axes);

}  // namespace dtrans
