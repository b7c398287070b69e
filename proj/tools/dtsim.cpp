#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dtrans/bathymetry.hpp"
#include "dtrans/perfmodel.hpp"
#include "dtrans/scenario.hpp"

using namespace dtrans;

namespace {

// One --<key> flag per scenario parameter; applied after the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::string config;

  void attach(CLI::App *app) {
    app->add_option("-c,--config", config, "INI scenario file")->check(CLI::ExistingFile);
    for (const auto &k : scenario_keys()) {
      ScenarioConfig defaults;
      app->add_option("--" + k, values[k], "default " + get_param(defaults, k));
    }
  }

  ScenarioConfig resolve(CLI::App *app, std::vector<std::pair<std::string, std::string>> *entries = nullptr) const {
    ScenarioConfig cfg;
    if (!config.empty()) {
      auto e = read_ini(config);
      apply_ini(cfg, e);
      if (entries) *entries = std::move(e);
    }
    for (const auto &[k, v] : values)
      if (app->count("--" + k) > 0) set_param(cfg, k, v);
    return cfg;
  }
};

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_run(CLI::App *app, const Overrides &o) {
  const ScenarioConfig cfg = o.resolve(app);
  const auto res = run_scenario(cfg, true);
  fmt::print("{}\n{}\n", metrics_header(), metrics_row(cfg, res));
  if (res.hump)
    fmt::print("hump: radius {:.0f} m, volume {:.4g} m^3 (grid {:.4g}), energy {:.4g} J = {:.3g} Mt TNT\n",
               res.hump->radius, res.hump->volume_analytic, res.hump->volume_grid, res.hump->energy_analytic,
               res.hump->energy_mt);
  if (cfg.kernel == "swe") fmt::print("dt {:.4g} s, CFL {:.3f}\n", res.dt, res.cfl);
  fmt::print("wrote {} ({} snapshot files)\n", cfg.out_dir, res.snapshots.size());
  return 0;
}

int cmd_sweep(CLI::App *app, const Overrides &o, const std::vector<std::string> &axis_flags) {
  std::vector<std::pair<std::string, std::string>> entries;
  const ScenarioConfig cfg = o.resolve(app, &entries);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  auto put = [&](const std::string &key, const std::string &list) {
    auto values = split(list, ',');
    for (auto &a : axes)
      if (a.first == key) {
        a.second = values;
        return;
      }
    axes.emplace_back(key, values);
  };
  for (const auto &[k, v] : entries)
    if (k.rfind("sweep.", 0) == 0) put(k.substr(6), v);
  for (const auto &f : axis_flags) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw ConfigError("--axis expects key=v1,v2,..., got '" + f + "'");
    put(f.substr(0, eq), f.substr(eq + 1));
  }
  const auto s = run_sweep(cfg, axes);
  fmt::print("{} cells: {} run, {} already present\n{}\n", s.cells, s.executed, s.skipped, s.metrics_path);
  return 0;
}

int cmd_fit(const std::string &path, double clock, double flops, bool seconds) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<CostSample> samples;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() < 2) continue;
    const double n = std::stod(cols[0]), v = std::stod(cols[1]);
    samples.push_back({n, seconds ? v * clock : v});
  }
  const auto fit = fit_cost_model(samples, clock, flops);
  const auto &m = fit.model;
  fmt::print("T(n) = {:.6g} + {:.6g} n + {:.6g} n^2 cycles\n", m.a0, m.a1, m.a2);
  fmt::print("samples {}, rms residual {:.3g} cycles, max relative residual {:.3g}\n", samples.size(),
             fit.rms_residual, fit.max_rel_residual);
  fmt::print("asymptotic utilization {:.1f}%\n", 100.0 * m.asymptotic_utilization());
  return 0;
}

int cmd_bounds(std::vector<double> G, int r, double latency, double c, double payload, double bandwidth, int d) {
  write_bound_curves(std::cout, G, r, latency, c, payload, bandwidth, d);
  const auto b = rate_bounds(G.front(), r, latency, c, payload, bandwidth, d);
  fmt::print("# G* = {:.6g}\n", b.threshold);
  return 0;
}

int cmd_resample(const std::string &in, const std::string &out, int rows, int cols, unsigned seed) {
  BathymetryRaster r = in.empty() ? synthetic_bathymetry(1024, 512, seed) : clamp_latitudes(load_bathymetry(in));
  if (rows > 0 || cols > 0) r = resample(r, rows > 0 ? rows : r.rows, cols > 0 ? cols : r.cols);
  if (out.size() >= 4 && out.substr(out.size() - 4) == ".asc")
    save_esri_ascii(r, out);
  else
    save_flat_binary(r, out);
  long land = 0;
  for (float z : r.elevation) land += z >= 0 ? 1 : 0;
  fmt::print("{} x {} cells, lat [{}, {}], lon [{}, {}], land fraction {:.3f} -> {}\n", r.cols, r.rows, r.lat_min,
             r.lat_max, r.lon_min, r.lon_max, static_cast<double>(land) / static_cast<double>(r.elevation.size()), out);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Domain-translation stencil simulator"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o;
  auto *run = app.add_subcommand("run", "run one scenario");
  run_o.attach(run);

  auto *sweep = app.add_subcommand("sweep", "run the Cartesian product of [sweep] axes");
  sweep_o.attach(sweep);
  std::vector<std::string> axis_flags;
  sweep->add_option("--axis", axis_flags, "key=v1,v2,... (repeatable, overrides [sweep])");

  auto *fit = app.add_subcommand("fit", "fit T(n) = a0 + a1 n + a2 n^2 to per-sweep timings");
  std::string fit_path;
  double fit_clock = 0.75e9, fit_flops = 9;
  bool fit_seconds = false;
  fit->add_option("telemetry", fit_path, "CSV with header; columns n,cycles")->required();
  fit->add_option("--clock-hz", fit_clock);
  fit->add_option("--flops-per-point", fit_flops);
  fit->add_flag("--seconds", fit_seconds, "second column is seconds, not cycles");

  auto *bounds = app.add_subcommand("bounds", "print compute/latency/bandwidth rate bounds");
  std::vector<double> G{16, 32, 64, 128, 256, 512, 1024};
  int r = 1, d = 1;
  double lat = 1e-6, c = 1e-9, payload = 8, bw = 12.5e9;
  bounds->add_option("-G,--G", G, "subdomain widths")->expected(1, -1);
  bounds->add_option("-r,--radius", r);
  bounds->add_option("--latency", lat, "seconds");
  bounds->add_option("--cost", c, "seconds per point update");
  bounds->add_option("--payload", payload, "bytes per edge point per step");
  bounds->add_option("--bandwidth", bw, "bytes/s");
  bounds->add_option("-d,--dims", d)->check(CLI::Range(1, 3));

  auto *rs = app.add_subcommand("resample", "clamp and area-average a bathymetry raster (.asc or .bin)");
  std::string rs_in, rs_out;
  int rows = 0, cols = 0;
  unsigned seed = 1;
  rs->add_option("--in", rs_in, "input raster; omitted means the built-in synthetic one");
  rs->add_option("--out", rs_out)->required();
  rs->add_option("--rows", rows);
  rs->add_option("--cols", cols);
  rs->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
  }

  try {
    if (*run) return cmd_run(run, run_o);
    if (*sweep) return cmd_sweep(sweep, sweep_o, axis_flags);
    if (*fit) return cmd_fit(fit_path, fit_clock, fit_flops, fit_seconds);
    if (*bounds) return cmd_bounds(G, r, lat, c, payload, bw, d);
    if (*rs) return cmd_resample(rs_in, rs_out, rows, cols, seed);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
