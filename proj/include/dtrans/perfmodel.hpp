#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dtrans {

// Per-sweep cost T(n) = a0 + a1 n + a2 n^2 in clock cycles, n = points per
// worker edge.
struct CostModel {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double clock_hz = 0.75e9;
  double flops_per_point = 9.0;
  static constexpr double peak_flops_per_cycle = 2.0;

  double cycles(double n) const { return a0 + (a1 * n + a2 * n * n); }
  double seconds(double n) const { return cycles(n) / clock_hz; }
  double flops_per_cycle(double n) const { return flops_per_point * n * n / cycles(n); }
  double utilization(double n) const { return flops_per_cycle(n) / peak_flops_per_cycle; }
  // n -> infinity
  double asymptotic_utilization() const { return flops_per_point / (peak_flops_per_cycle * a2); }

  void validate() const;

  static CostModel heat5() { return {105.0, 3.74, 6.72, 0.75e9, 9.0}; }
  static CostModel heat9() { return {97.0, 3.5, 9.37, 0.75e9, 17.0}; }
  static CostModel swe() { return {1026.0, 183.2, 137.6, 0.75e9, 155.0}; }
};

struct CostEval {
  double cycles = 0.0;
  double flops_per_cycle = 0.0;
};

CostEval eval_cost(const CostModel &m, double n);

struct RateBounds {
  double compute_rate = 0.0;    // 1/(c G^d)
  double latency_rate = 0.0;    // G/(2 r lambda)
  double bandwidth_rate = 0.0;  // beta / payload
  double effective = 0.0;
  double threshold = 0.0;       // G* where compute and latency bounds cross

  std::string limiter() const;
};

// c is the time per point update (seconds), payload the bytes per step on
// the busiest link, d the dimensionality of the per-worker subdomain.
RateBounds rate_bounds(double G, int r, double latency, double c, double payload_bytes, double bandwidth, int d = 1);

// (1 - f*lambda/G)^d; throws RangeError when f*lambda >= G.
double ghost_utilization(double f, double latency, double G, int d);
// 1 - ((G - 2w)/G)^d; throws RangeError unless 0 <= 2w <= G.
double ghost_volume_fraction(double G, double w, int d);

struct CostSample {
  double n = 0.0;
  double cycles = 0.0;
};

struct CostFit {
  CostModel model;
  std::vector<double> residuals;
  double rms_residual = 0.0;
  double max_rel_residual = 0.0;
};

// Least squares on (1, n, n^2). Throws RangeError with fewer than three
// distinct n or a rank-deficient design.
CostFit fit_cost_model(const std::vector<CostSample> &samples, double clock_hz = 0.75e9, double flops_per_point = 9.0);

struct PayloadSample {
  double n = 0.0;      // points per core edge
  double fabric = 1.0; // cores along the transmitting edge
  double horizontal_bytes = 0.0;
  double vertical_bytes = 0.0;
};

// bytes_h = b0 (n F) + b1 F + b2, bytes_v = d0 (n F) + d1 F + d2.
struct PayloadRegression {
  double b0 = 0, b1 = 0, b2 = 0;
  double d0 = 0, d1 = 0, d2 = 0;

  double horizontal(double n, double fabric) const { return b0 * n * fabric + b1 * fabric + b2; }
  double vertical(double n, double fabric) const { return d0 * n * fabric + d1 * fabric + d2; }
  double busiest(double n, double fabric) const;
  // Drops the per-core edge term (a transmit filter removes the repeated corner points).
  PayloadRegression filtered() const;

  // What the halo exchange sends for radius r and `fields` float32 fields:
  // w*n per field each way plus the w*w corner on the vertical channel.
  static PayloadRegression exchange(int r, int fields);
};

// If every sample has the same fabric length, the F and constant columns
// coincide and the joint coefficient is reported as b2/d2 with b1 = d1 = 0.
PayloadRegression fit_payload(const std::vector<PayloadSample> &samples);

struct ClusterConfig {
  CostModel cost;
  PayloadRegression payload;
  double n = 16;              // points per core edge
  double fabric = 1;          // cores per node edge
  double bandwidth = 0;       // bytes/s per direction (<= 0 means unlimited)
  double latency_h = 0, latency_v = 0;
  int radius = 1;
  long nodes = 1;
};

struct ClusterPrediction {
  double compute_rate = 0, io_rate = 0, latency_rate = 0;
  double steps_per_second = 0;
  double flops_per_second = 0;
  double flops_per_cycle = 0;  // per core
  std::string limiter;
};

// min(compute, IO, pipeline) in steps/s. The pipeline term is the
// translation pipeline's warm-window bound (D+1)/(T + path), D = ceil(N/2r)
// sweeps in flight, which vanishes as a limiter once N is large. path is the
// slower of the vertical hop and horizontal-then-corner.
ClusterPrediction predict_cluster(const ClusterConfig &cfg);

// Points per core (n^2) where the compute and IO bounds cross, by bisection
// on n in [lo, hi]. Returns 0 if there is no crossing in the range.
double io_crossover_points(ClusterConfig cfg, double lo = 1.0, double hi = 4096.0);

// Bound curves for plotting: one row per G.
void write_bound_curves(std::ostream &os, const std::vector<double> &G, int r, double latency, double c,
                        double payload_per_point, double bandwidth, int d);
void write_prediction_curve(std::ostream &os, ClusterConfig cfg, const std::vector<double> &ns);

}  // namespace dtrans
