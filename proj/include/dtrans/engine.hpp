#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dtrans/grid.hpp"
#include "dtrans/kernels.hpp"
#include "dtrans/netsim.hpp"
#include "dtrans/perfmodel.hpp"

namespace dtrans {

enum class Method { Translation, Static, Ghost };

struct MethodConfig {
  Method method = Method::Translation;
  int ghost_steps = 1;  // p_g, steps between exchanges

  int ghost_width(int r) const { return r * ghost_steps; }
  void validate(int n, int r) const;
  std::string name() const;
  static MethodConfig parse(const std::string &s, int ghost_steps = 1);
};

// All fields of a program on the full torus, row-major gy x gx each.
struct GlobalState {
  int gx = 0, gy = 0;
  std::vector<std::vector<Scalar>> fields;

  GlobalState() = default;
  GlobalState(int gx_, int gy_, int field_count, Scalar fill = 0.0f);

  Scalar &at(int f, long i, long j) { return fields[static_cast<std::size_t>(f)][index(i, j)]; }
  Scalar at(int f, long i, long j) const { return fields[static_cast<std::size_t>(f)][index(i, j)]; }
  std::size_t index(long i, long j) const { return static_cast<std::size_t>(i * gx + j); }

  bool operator==(const GlobalState &) const = default;
};

// Compares the listed fields bitwise. Returns the number of differing values.
long count_differences(const GlobalState &a, const GlobalState &b, const std::vector<int> &fields);

struct TimingConfig {
  bool enabled = false;
  LinkModel link;
  LinkModel self_link{0.0, std::numeric_limits<double>::infinity()};
  // Per-sweep compute time. If sweep_seconds > 0 it overrides the cost model.
  CostModel cost = CostModel::heat5();
  double sweep_seconds = 0.0;
  int sample_every = 1;
  // leading fraction of telemetry ignored when estimating steps/s
  double warmup_fraction = 0.3;
  bool trace = false;

  // Time for one full step over an m x m region of a worker holding n x n.
  double sweep_time(double m, double n) const {
    return sweep_seconds > 0 ? sweep_seconds * (m / n) * (m / n) : cost.seconds(m);
  }
};

struct RunConfig {
  TorusGeometry geom;
  MethodConfig method;
  long steps = 0;
  bool numerics = true;
  // Overwrites received halos with NaN after every step so stale reads surface.
  bool poison_halos = false;
  TimingConfig timing;
  long snapshot_every = 0;
  std::function<void(long step, const GlobalState &)> on_snapshot;
};

struct RunResult {
  GlobalState final_state;
  TranslationOffset offset;

  // timing plane
  std::vector<Telemetry> telemetry;  // per worker
  double steps_per_second = 0.0;     // slowest worker, warm-up discarded
  double end_time = 0.0;
  long max_skew = 0;                 // largest difference in completed sweeps between workers
  long sweeps_before_first_arrival = -1;  // worker 0
  std::optional<Network> timing_network;
  std::vector<TraceEvent> trace;

  // numerics plane
  std::optional<Network> numerics_network;
};

// Runs `steps` iterations of `program` on the torus described by cfg.geom
// starting from `init` (which must be geom.global_y() x geom.global_x()).
RunResult run(const StencilProgram &program, const GlobalState &init, const RunConfig &cfg);

// Single-grid periodic reference: one worker, direct sweep, no messages.
GlobalState run_reference(const StencilProgram &program, const GlobalState &init, long steps);

// Steps/s from telemetry with the first `skip_fraction` of samples dropped,
// minimum over workers.
double slowest_rate(const std::vector<Telemetry> &telemetry, double skip_fraction);

}  // namespace dtrans
