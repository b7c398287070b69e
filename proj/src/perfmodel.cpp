#include "dtrans/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <Eigen/Dense>

#include "dtrans/error.hpp"

namespace dtrans {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void CostModel::validate() const {
  if (!(clock_hz > 0.0)) throw ConfigError("cost model clock must be > 0");
  if (!(flops_per_point > 0.0)) throw ConfigError("cost model flops_per_point must be > 0");
  if (cycles(1.0) <= 0.0 || a2 < 0.0) throw ConfigError("cost model must give T(n) > 0 for n >= 1");
}

CostEval eval_cost(const CostModel &m, double n) {
  if (!(n >= 1.0)) throw RangeError("eval_cost needs n >= 1");
  return {m.cycles(n), m.flops_per_cycle(n)};
}

std::string RateBounds::limiter() const {
  if (effective == compute_rate) return "compute";
  if (effective == latency_rate) return "latency";
  return "bandwidth";
}

RateBounds rate_bounds(double G, int r, double latency, double c, double payload_bytes, double bandwidth, int d) {
  if (!(G > 0) || r < 1 || !(c > 0) || d < 1 || latency < 0 || payload_bytes < 0 || !(bandwidth > 0))
    throw RangeError("rate_bounds needs positive parameters");
  RateBounds b;
  b.compute_rate = 1.0 / (c * std::pow(G, d));
  b.latency_rate = latency > 0 ? G / (2.0 * r * latency) : kInf;
  b.bandwidth_rate = (payload_bytes > 0 && std::isfinite(bandwidth)) ? bandwidth / payload_bytes : kInf;
  b.effective = std::min({b.compute_rate, b.latency_rate, b.bandwidth_rate});
  b.threshold = std::pow(2.0 * r * latency / c, 1.0 / (d + 1));
  return b;
}

double ghost_utilization(double f, double latency, double G, int d) {
  if (f < 0 || latency < 0 || !(G > 0) || d < 1) throw RangeError("ghost_utilization: bad parameters");
  const double x = f * latency / G;
  if (x >= 1.0) throw RangeError("ghost_utilization: target rate unachievable (f*lambda >= G)");
  return std::pow(1.0 - x, d);
}

double ghost_volume_fraction(double G, double w, int d) {
  if (!(G > 0) || w < 0 || 2 * w > G || d < 1) throw RangeError("ghost_volume_fraction needs 0 <= 2w <= G");
  return 1.0 - std::pow((G - 2 * w) / G, d);
}

CostFit fit_cost_model(const std::vector<CostSample> &samples, double clock_hz, double flops_per_point) {
  std::set<double> distinct;
  for (const auto &s : samples) distinct.insert(s.n);
  if (distinct.size() < 3) throw RangeError("fit_cost_model needs at least 3 distinct n values");

  const auto m = static_cast<Eigen::Index>(samples.size());
  // columns scaled by the largest n to keep the design well conditioned
  const double scale = *distinct.rbegin();
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = samples[static_cast<std::size_t>(i)].n / scale;
    A(i, 0) = 1.0;
    A(i, 1) = x;
    A(i, 2) = x * x;
    y(i) = samples[static_cast<std::size_t>(i)].cycles;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) throw RangeError("fit_cost_model: rank-deficient design");
  const Eigen::VectorXd a = qr.solve(y);

  CostFit fit;
  fit.model = CostModel{a(0), a(1) / scale, a(2) / (scale * scale), clock_hz, flops_per_point};
  double ss = 0;
  for (const auto &s : samples) {
    const double res = s.cycles - fit.model.cycles(s.n);
    fit.residuals.push_back(res);
    ss += res * res;
    if (s.cycles != 0.0) fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(res / s.cycles));
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(samples.size()));
  return fit;
}

double PayloadRegression::busiest(double n, double fabric) const {
  return std::max(horizontal(n, fabric), vertical(n, fabric));
}

PayloadRegression PayloadRegression::filtered() const {
  PayloadRegression p = *this;
  p.b1 = 0;
  p.d1 = 0;
  return p;
}

PayloadRegression PayloadRegression::exchange(int r, int fields) {
  const double w = 2.0 * r;
  const double per = 4.0 * fields;
  PayloadRegression p;
  p.b0 = per * w;
  p.d0 = per * w;
  p.d1 = per * w * w;
  return p;
}

namespace {

Eigen::Vector3d fit_three(const std::vector<PayloadSample> &s, bool vertical, bool one_fabric) {
  const auto m = static_cast<Eigen::Index>(s.size());
  const int cols = one_fabric ? 2 : 3;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto &p = s[static_cast<std::size_t>(i)];
    A(i, 0) = p.n * p.fabric;
    if (one_fabric) {
      A(i, 1) = 1.0;
    } else {
      A(i, 1) = p.fabric;
      A(i, 2) = 1.0;
    }
    y(i) = vertical ? p.vertical_bytes : p.horizontal_bytes;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < cols) throw RangeError("fit_payload: rank-deficient design (vary n and fabric length)");
  const Eigen::VectorXd c = qr.solve(y);
  if (one_fabric) return {c(0), 0.0, c(1)};
  return {c(0), c(1), c(2)};
}

}  // namespace

PayloadRegression fit_payload(const std::vector<PayloadSample> &samples) {
  if (samples.size() < 2) throw RangeError("fit_payload needs at least 2 samples");
  std::set<double> fabrics;
  for (const auto &s : samples) fabrics.insert(s.fabric);
  const bool one = fabrics.size() == 1;
  const auto h = fit_three(samples, false, one);
  const auto v = fit_three(samples, true, one);
  return PayloadRegression{h(0), h(1), h(2), v(0), v(1), v(2)};
}

ClusterPrediction predict_cluster(const ClusterConfig &cfg) {
  cfg.cost.validate();
  if (!(cfg.n >= 1) || !(cfg.fabric >= 1) || cfg.radius < 1 || cfg.nodes < 1)
    throw RangeError("predict_cluster: bad geometry");
  ClusterPrediction p;
  const double T = cfg.cost.seconds(cfg.n);
  p.compute_rate = 1.0 / T;

  const double bh = cfg.payload.horizontal(cfg.n, cfg.fabric);
  const double bv = cfg.payload.vertical(cfg.n, cfg.fabric);
  const bool unlimited = !(cfg.bandwidth > 0) || !std::isfinite(cfg.bandwidth);
  const double busiest = std::max(bh, bv);
  p.io_rate = (unlimited || busiest <= 0) ? kInf : cfg.bandwidth / busiest;

  // The channels run in parallel; the corner rides a second hop after the
  // horizontal package lands.
  const double inv_bw = unlimited ? 0.0 : 1.0 / cfg.bandwidth;
  const double corner = cfg.payload.d1 * cfg.fabric;
  const double path = std::max(cfg.latency_v + bv * inv_bw, cfg.latency_h + bh * inv_bw + cfg.latency_v + corner * inv_bw);
  const double depth = std::ceil(cfg.n * cfg.fabric / (2.0 * cfg.radius));
  p.latency_rate = path > 0 ? (depth + 1.0) / (T + path) : kInf;

  p.steps_per_second = std::min({p.compute_rate, p.io_rate, p.latency_rate});
  if (p.steps_per_second == p.compute_rate)
    p.limiter = "compute";
  else if (p.steps_per_second == p.io_rate)
    p.limiter = "io";
  else
    p.limiter = "latency";

  const double cores = cfg.fabric * cfg.fabric;
  p.flops_per_second = p.steps_per_second * cfg.cost.flops_per_point * cfg.n * cfg.n * cores *
                       static_cast<double>(cfg.nodes);
  p.flops_per_cycle = p.steps_per_second * cfg.cost.flops_per_point * cfg.n * cfg.n / cfg.cost.clock_hz;
  return p;
}

double io_crossover_points(ClusterConfig cfg, double lo, double hi) {
  auto gap = [&](double n) {
    cfg.n = n;
    const auto p = predict_cluster(cfg);
    return std::log(p.io_rate) - std::log(p.compute_rate);
  };
  double glo = gap(lo), ghi = gap(hi);
  if (!std::isfinite(glo) || !std::isfinite(ghi) || (glo > 0) == (ghi > 0)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if ((g > 0) == (glo > 0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
    }
  }
  const double n = 0.5 * (lo + hi);
  return n * n;
}

void write_bound_curves(std::ostream &os, const std::vector<double> &G, int r, double latency, double c,
                        double payload_per_point, double bandwidth, int d) {
  os << "G,compute_rate,latency_rate,bandwidth_rate,effective,limiter\n";
  for (double g : G) {
    const auto b = rate_bounds(g, r, latency, c, payload_per_point * std::pow(g, d - 1), bandwidth, d);
    os << g << ',' << b.compute_rate << ',' << b.latency_rate << ',' << b.bandwidth_rate << ',' << b.effective << ','
       << b.limiter() << '\n';
  }
}

void write_prediction_curve(std::ostream &os, ClusterConfig cfg, const std::vector<double> &ns) {
  os << "n,points_per_core,compute_rate,io_rate,latency_rate,steps_per_second,flops_per_second,flops_per_cycle,"
        "limiter\n";
  for (double n : ns) {
    cfg.n = n;
    const auto p = predict_cluster(cfg);
    os << n << ',' << n * n << ',' << p.compute_rate << ',' << p.io_rate << ',' << p.latency_rate << ','
       << p.steps_per_second << ',' << p.flops_per_second << ',' << p.flops_per_cycle << ',' << p.limiter << '\n';
  }
}

}  // namespace dtrans
