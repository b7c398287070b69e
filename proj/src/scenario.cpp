#include "dtrans/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "dtrans/io.hpp"

namespace dtrans {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

double parse_double(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

long parse_long(const std::string &key, const std::string &v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<long>(x);
}

bool parse_bool(const std::string &key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt_double(double x) { return fmt::format("{}", x); }

struct Param {
  std::string section;
  std::function<void(ScenarioConfig &, const std::string &, const std::string &)> set;
  std::function<std::string(const ScenarioConfig &)> get;
};

template <class T>
Param num(const char *section, T ScenarioConfig::*m) {
  return {section,
          [m](ScenarioConfig &c, const std::string &k, const std::string &v) {
            if constexpr (std::is_floating_point_v<T>)
              c.*m = parse_double(k, v);
            else
              c.*m = static_cast<T>(parse_long(k, v));
          },
          [m](const ScenarioConfig &c) {
            if constexpr (std::is_floating_point_v<T>)
              return fmt_double(c.*m);
            else
              return std::to_string(c.*m);
          }};
}

Param text(const char *section, std::string ScenarioConfig::*m) {
  return {section, [m](ScenarioConfig &c, const std::string &, const std::string &v) { c.*m = v; },
          [m](const ScenarioConfig &c) { return c.*m; }};
}

Param flag(const char *section, bool ScenarioConfig::*m) {
  return {section, [m](ScenarioConfig &c, const std::string &k, const std::string &v) { c.*m = parse_bool(k, v); },
          [m](const ScenarioConfig &c) { return std::string(c.*m ? "true" : "false"); }};
}

const std::map<std::string, Param> &params() {
  static const std::map<std::string, Param> p = {
      {"kernel", text("run", &ScenarioConfig::kernel)},
      {"method", text("run", &ScenarioConfig::method)},
      {"ghost_steps", num("run", &ScenarioConfig::ghost_steps)},
      {"steps", num("run", &ScenarioConfig::steps)},
      {"dt", num("run", &ScenarioConfig::dt)},
      {"alpha", num("run", &ScenarioConfig::alpha)},
      {"alpha_diag", num("run", &ScenarioConfig::alpha_diag)},
      {"seed", num("run", &ScenarioConfig::seed)},
      {"workers_x", num("geometry", &ScenarioConfig::workers_x)},
      {"workers_y", num("geometry", &ScenarioConfig::workers_y)},
      {"n", num("geometry", &ScenarioConfig::n)},
      {"latency", num("link", &ScenarioConfig::latency)},
      {"bandwidth", num("link", &ScenarioConfig::bandwidth)},
      {"timing", flag("timing", &ScenarioConfig::timing)},
      {"numerics", flag("timing", &ScenarioConfig::numerics)},
      {"clock_hz", num("timing", &ScenarioConfig::clock_hz)},
      {"telemetry_every", num("timing", &ScenarioConfig::telemetry_every)},
      {"out_dir", text("output", &ScenarioConfig::out_dir)},
      {"snapshot_every", num("output", &ScenarioConfig::snapshot_every)},
      {"snapshot_csv", flag("output", &ScenarioConfig::snapshot_csv)},
      {"bathymetry", text("swe", &ScenarioConfig::bathymetry)},
      {"cfl_target", num("swe", &ScenarioConfig::cfl_target)},
      {"cfl_max", num("swe", &ScenarioConfig::cfl_max)},
      {"hump", flag("swe", &ScenarioConfig::hump)},
      {"hump_lat", num("swe", &ScenarioConfig::hump_lat)},
      {"hump_lon", num("swe", &ScenarioConfig::hump_lon)},
      {"hump_area", num("swe", &ScenarioConfig::hump_area)},
      {"hump_peak", num("swe", &ScenarioConfig::hump_peak)},
  };
  return p;
}

const Param &lookup(const std::string &key) {
  const auto dot = key.rfind('.');
  const std::string bare = dot == std::string::npos ? key : key.substr(dot + 1);
  const auto it = params().find(bare);
  if (it == params().end()) throw ConfigError("unknown parameter '" + key + "'");
  if (dot != std::string::npos && key.substr(0, dot) != it->second.section)
    throw ConfigError("parameter '" + bare + "' belongs in [" + it->second.section + "], not [" + key.substr(0, dot) + "]");
  return it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

int ScenarioConfig::radius() const {
  if (kernel == "heat5" || kernel == "heat9" || kernel == "swe") return 1;
  throw ConfigError("kernel must be heat5, heat9 or swe, not '" + kernel + "'");
}

MethodConfig ScenarioConfig::method_config() const { return MethodConfig::parse(method, ghost_steps); }

void ScenarioConfig::validate() const {
  const int r = radius();
  if (workers_x < 1 || workers_y < 1) throw ConfigError("workers_x and workers_y must be at least 1");
  if (n < 2 * r)
    throw ConfigError(fmt::format("n = {} is smaller than the package width 2r = {}; every worker needs n >= 2r", n, 2 * r));
  if (ghost_steps < 1) throw ConfigError("ghost_steps must be at least 1");
  method_config().validate(n, r);
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (!(latency >= 0) || !std::isfinite(latency)) throw ConfigError("latency must be a finite non-negative time");
  if (!(bandwidth > 0)) throw ConfigError("bandwidth must be positive (use inf for unlimited)");
  if (!(clock_hz > 0)) throw ConfigError("clock_hz must be positive");
  if (telemetry_every < 1) throw ConfigError("telemetry_every must be at least 1");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  if (!(dt >= 0)) throw ConfigError("dt must be non-negative");
  if (!timing && !numerics) throw ConfigError("nothing to do: both timing and numerics are off");
  if (kernel == "swe") {
    if (!(cfl_target > 0) || !(cfl_max > 0)) throw ConfigError("cfl_target and cfl_max must be positive");
    if (!bathymetry.empty() && !fs::exists(bathymetry)) throw ConfigError("bathymetry file not found: " + bathymetry);
    if (hump && (!(hump_area > 0) || !(hump_peak >= 0))) throw ConfigError("hump area must be positive, peak non-negative");
  }
}

const std::vector<std::string> &scenario_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto &[name, _] : params()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_param(ScenarioConfig &cfg, const std::string &key, const std::string &value) {
  lookup(key).set(cfg, key, value);
}

std::string get_param(const ScenarioConfig &cfg, const std::string &key) { return lookup(key).get(cfg); }

std::vector<std::pair<std::string, std::string>> read_ini(const std::string &path) {
  if (!fs::exists(path)) throw IoError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error &e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &it : items) {
    if (it.name == "++" || it.name == "--") continue;
    std::string key;
    for (const auto &p : it.parents) key += p + ".";
    key += it.name;
    std::string value;
    for (std::size_t q = 0; q < it.inputs.size(); ++q) value += (q ? "," : "") + it.inputs[q];
    out.emplace_back(key, value);
  }
  return out;
}

void apply_ini(ScenarioConfig &cfg, const std::vector<std::pair<std::string, std::string>> &entries) {
  for (const auto &[k, v] : entries)
    if (k.rfind("sweep.", 0) != 0) set_param(cfg, k, v);
}

// ---------------------------------------------------------------------------
// run

double domain_cfl(const SweDomain &d) {
  double worst = 0;
  for (int i = 0; i < d.gy; ++i) {
    double deepest = 0;
    for (int j = 0; j < d.gx; ++j)
      if (!d.land[d.index(i, j)]) deepest = std::max(deepest, d.sea_level - d.b[d.index(i, j)]);
    if (deepest > 0) worst = std::max(worst, swe_cfl(d.grid, deepest, std::abs(d.grid.lat_of_row(i))));
  }
  return worst;
}

SweDomain scenario_domain(const ScenarioConfig &cfg, double dt) {
  const int gx = cfg.workers_x * cfg.n, gy = cfg.workers_y * cfg.n;
  BathymetryRaster raster = cfg.bathymetry.empty() ? synthetic_bathymetry(1024, 512, cfg.seed)
                                                   : clamp_latitudes(load_bathymetry(cfg.bathymetry));
  if (raster.rows != gy || raster.cols != gx) {
    if (raster.rows % gy != 0 || raster.cols % gx != 0)
      throw ConfigError(fmt::format("bathymetry {}x{} cannot be area-averaged onto the {}x{} run grid", raster.cols,
                                    raster.rows, gx, gy));
    raster = resample(raster, gy, gx);
  }
  return make_domain(raster, dt);
}

namespace {

struct Built {
  std::unique_ptr<StencilProgram> program;
  GlobalState init;
  CostModel cost;
  double dt = 0, cfl = 0;
  std::optional<HumpReport> hump;
  double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

Built build(const ScenarioConfig &cfg) {
  Built b;
  const int gx = cfg.workers_x * cfg.n, gy = cfg.workers_y * cfg.n;
  if (cfg.kernel == "swe") {
    auto d = scenario_domain(cfg, cfg.dt > 0 ? cfg.dt : 1.0);
    if (cfg.dt <= 0) {
      const double unit = domain_cfl(d);
      if (!(unit > 0)) throw ConfigError("swe domain has no water");
      d.grid.dt = cfg.cfl_target / unit;
    }
    b.dt = d.grid.dt;
    b.cfl = domain_cfl(d);
    if (b.cfl > cfg.cfl_max * (1 + 1e-12))
      throw ConfigError(fmt::format("dt = {} s gives a gravity-wave CFL number of {:.3f}, above cfl_max = {}", b.dt,
                                    b.cfl, cfg.cfl_max));
    b.init = swe_rest_state(d);
    if (cfg.hump) b.hump = place_impact_hump(b.init, d, {cfg.hump_lat, cfg.hump_lon, cfg.hump_area, cfg.hump_peak});
    b.program = std::make_unique<SweProgram>(d.grid);
    b.cost = CostModel::swe();
    b.lat_min = (d.grid.lat0 - 0.5 * d.grid.dlat) / kDeg;
    b.lat_max = b.lat_min + gy * d.grid.dlat / kDeg;
    b.lon_min = (d.grid.lon0 - 0.5 * d.grid.dlon) / kDeg;
    b.lon_max = b.lon_min + gx * d.grid.dlon / kDeg;
    return b;
  }
  const auto k = cfg.kernel == "heat5" ? LinearStencilKernel::heat5(static_cast<float>(cfg.alpha))
                                       : LinearStencilKernel::heat9(static_cast<float>(cfg.alpha),
                                                                    static_cast<float>(cfg.alpha_diag));
  b.program = std::make_unique<LinearProgram>(k);
  b.cost = cfg.kernel == "heat5" ? CostModel::heat5() : CostModel::heat9();
  b.init = GlobalState(gx, gy, 1);
  if (cfg.numerics) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto &x : b.init.fields[0]) x = u(rng);
  }
  b.dt = 1.0;  // nondimensional
  b.lat_max = gy;
  b.lon_max = gx;
  return b;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig &cfg, bool write_files) {
  cfg.validate();
  Built b = build(cfg);
  b.cost.clock_hz = cfg.clock_hz;

  ScenarioResult res;
  res.dt = b.dt;
  res.cfl = b.cfl;
  res.hump = b.hump;
  for (int s = 0; s < b.program->substeps(); ++s) res.flops_per_step += b.program->flops_per_point(s);

  RunConfig rc;
  rc.geom = {cfg.workers_x, cfg.workers_y, cfg.n};
  rc.method = cfg.method_config();
  rc.steps = cfg.steps;
  rc.numerics = cfg.numerics;
  rc.timing.enabled = cfg.timing;
  rc.timing.link = {cfg.latency, cfg.bandwidth};
  rc.timing.cost = b.cost;
  rc.timing.sample_every = cfg.telemetry_every;

  const fs::path out(cfg.out_dir);
  if (write_files && cfg.numerics && cfg.snapshot_every > 0) {
    rc.snapshot_every = cfg.snapshot_every;
    const auto names = b.program->field_names();
    const auto state = b.program->state_fields();
    rc.on_snapshot = [&, names, state](long step, const GlobalState &s) {
      for (int f : state) {
        SnapshotMeta m{names[static_cast<std::size_t>(f)], s.gx, s.gy, step, step * b.dt,
                       b.lat_min, b.lat_max, b.lon_min, b.lon_max};
        const auto base = (out / "snapshots" / fmt::format("{}_{:08d}", m.field, step)).string();
        write_snapshot(base, s.fields[static_cast<std::size_t>(f)], m, cfg.snapshot_csv);
        res.snapshots.push_back(base);
      }
    };
  }

  res.run = run(*b.program, b.init, rc);

  ClusterConfig cc;
  cc.cost = b.cost;
  std::size_t widest = 0;
  for (int s = 0; s < b.program->substeps(); ++s)
    widest = std::max(widest, b.program->exchanged(s, Frame::Translating).size());
  cc.payload = PayloadRegression::exchange(b.program->radius(), static_cast<int>(widest));
  cc.n = cfg.n;
  cc.bandwidth = cfg.bandwidth;
  cc.latency_h = cc.latency_v = cfg.latency;
  cc.radius = b.program->radius();
  cc.nodes = rc.geom.worker_count();
  res.predicted = predict_cluster(cc);

  if (write_files) {
    fs::create_directories(out);
    if (cfg.timing) {
      std::ostringstream w;
      w << "worker,steps_per_second,flops_per_second\n";
      const double pts = static_cast<double>(cfg.n) * cfg.n;
      for (std::size_t q = 0; q < res.run.telemetry.size(); ++q) {
        const double rate = measured_rate(res.run.telemetry[q], rc.timing.warmup_fraction);
        w << q << ',' << fmt_double(rate) << ',' << fmt_double(rate * pts * static_cast<double>(res.flops_per_step)) << '\n';
      }
      write_text_file((out / "workers.csv").string(), w.str());
      std::ostringstream t;
      write_telemetry_csv(t, res.run.telemetry);
      write_text_file((out / "telemetry.csv").string(), t.str());
      std::ostringstream l;
      res.run.timing_network->write_counters_csv(l);
      write_text_file((out / "links.csv").string(), l.str());
    }
    // model bounds on an n axis around the configured size
    std::ostringstream curve;
    std::vector<double> ns;
    for (double x = 2; x <= std::max(2.0 * cfg.n, 512.0); x *= 2) ns.push_back(x);
    write_prediction_curve(curve, cc, ns);
    write_text_file((out / "model.csv").string(), curve.str());
    // last, so its presence marks a finished run
    write_text_file((out / "metrics.csv").string(), metrics_header() + "\n" + metrics_row(cfg, res) + "\n");
  }
  return res;
}

std::string metrics_header() {
  return "kernel,method,ghost_steps,workers_x,workers_y,n,latency,bandwidth,steps,seed,dt,"
         "steps_per_second,flops_per_second,predicted_steps_per_second,predicted_limiter,end_time,"
         "max_skew,messages,bytes";
}

std::string metrics_row(const ScenarioConfig &c, const ScenarioResult &r) {
  long messages = 0, bytes = 0;
  if (r.run.timing_network)
    for (const auto &l : r.run.timing_network->links()) {
      messages += l.counters().sent_messages;
      bytes += l.counters().sent_bytes;
    }
  const double points = static_cast<double>(c.workers_x) * c.workers_y * c.n * c.n;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", c.kernel, c.method, c.ghost_steps,
                     c.workers_x, c.workers_y, c.n, fmt_double(c.latency), fmt_double(c.bandwidth), c.steps, c.seed,
                     fmt_double(r.dt), fmt_double(r.run.steps_per_second),
                     fmt_double(r.run.steps_per_second * points * static_cast<double>(r.flops_per_step)),
                     fmt_double(r.predicted.steps_per_second), r.predicted.limiter, fmt_double(r.run.end_time),
                     r.run.max_skew, messages, bytes);
}

}  // namespace dtrans
