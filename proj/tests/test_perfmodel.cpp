#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "dtrans/engine.hpp"
#include "dtrans/perfmodel.hpp"

using namespace dtrans;

namespace {

std::vector<CostSample> synth(const CostModel &m, std::vector<double> ns) {
  std::vector<CostSample> s;
  for (double n : ns) s.push_back({n, m.cycles(n)});
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("reference cost models") {
  const auto h5 = CostModel::heat5(), h9 = CostModel::heat9(), sw = CostModel::swe();
  CHECK(h5.cycles(32) == doctest::Approx(7105.96).epsilon(1e-12));
  CHECK(eval_cost(h5, 32).cycles == doctest::Approx(7105.96));
  CHECK(h5.flops_per_point * 1.0 / h5.a2 == doctest::Approx(1.339).epsilon(1e-3));
  CHECK(h5.asymptotic_utilization() == doctest::Approx(0.67).epsilon(0.005 / 0.67));
  CHECK(h9.asymptotic_utilization() == doctest::Approx(0.91).epsilon(0.005 / 0.91));
  CHECK(sw.asymptotic_utilization() == doctest::Approx(0.56).epsilon(0.005 / 0.56));
  CHECK(h5.utilization(1e6) == doctest::Approx(h5.asymptotic_utilization()).epsilon(1e-4));
  CHECK_THROWS_AS((CostModel{0, 0, 0}.validate()), ConfigError);
}

TEST_CASE("rate bounds") {
  auto b = rate_bounds(100, 1, 10e-6, 1e-9, 0, INFINITY);
  CHECK(b.threshold == doctest::Approx(141.42).epsilon(1e-4));
  auto z = rate_bounds(100, 1, 0.0, 1e-9, 800, 1e9);
  CHECK(std::isinf(z.latency_rate));
  CHECK(z.effective == std::min(z.compute_rate, z.bandwidth_rate));
  auto big = rate_bounds(1000, 1, 10e-6, 1e-9, 0, INFINITY);
  CHECK(big.latency_rate == doctest::Approx(5e7));
  CHECK(big.compute_rate == doctest::Approx(1e6));
  CHECK(big.limiter() == "compute");
  CHECK_THROWS_AS(rate_bounds(0, 1, 1e-6, 1e-9, 0, 1e9), RangeError);
}

TEST_CASE("rate bound properties") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> lg(-1, 1);
  double prev_c = INFINITY, prev_l = 0;
  for (double G = 8; G <= 4096; G *= 1.5) {
    const double lam = 1e-6 * std::pow(10, 2 * lg(rng)), c = 1e-9 * std::pow(10, lg(rng));
    for (int d : {1, 2, 3}) {
      auto b = rate_bounds(G, 1, lam, c, 8 * G, 1e10, d);
      CHECK(b.effective <= b.compute_rate);
      CHECK(b.effective <= b.latency_rate);
      CHECK(b.effective <= b.bandwidth_rate);
    }
    auto b = rate_bounds(G, 1, 1e-6, 1e-9, 0, INFINITY);
    CHECK(b.compute_rate < prev_c);
    CHECK(b.latency_rate > prev_l);
    prev_c = b.compute_rate;
    prev_l = b.latency_rate;
  }
  // the 1D crossing is at G*
  auto at = rate_bounds(141.4213562373095, 1, 10e-6, 1e-9, 0, INFINITY);
  CHECK(at.compute_rate == doctest::Approx(at.latency_rate).epsilon(1e-9));
}

TEST_CASE("ghost method formulas") {
  CHECK(ghost_utilization(0.1, 1.0, 1.0, 2) == doctest::Approx(0.81));
  CHECK(ghost_utilization(1e6, 0.0, 64, 3) == 1.0);
  CHECK(ghost_volume_fraction(100, 10, 2) == doctest::Approx(0.36));
  CHECK(ghost_volume_fraction(100, 0, 2) == 0.0);
  CHECK_THROWS_AS(ghost_utilization(1, 10, 10, 1), RangeError);
  CHECK_THROWS_AS(ghost_volume_fraction(10, 6, 2), RangeError);
}

TEST_CASE("cost fit round trips") {
  for (const auto &m : {CostModel::heat5(), CostModel::heat9(), CostModel::swe()}) {
    auto f = fit_cost_model(synth(m, {2, 4, 8, 16, 32, 64}), m.clock_hz, m.flops_per_point);
    CHECK(rel(f.model.a0, m.a0) <= 1e-9);
    CHECK(rel(f.model.a1, m.a1) <= 1e-9);
    CHECK(rel(f.model.a2, m.a2) <= 1e-9);
    CHECK(f.max_rel_residual <= 1e-12);
  }
  auto flat = fit_cost_model(synth({500, 0, 0}, {2, 4, 8, 16}));
  CHECK(flat.model.a0 == doctest::Approx(500));
  CHECK(std::abs(flat.model.a1) <= 1e-9);
  CHECK(std::abs(flat.model.a2) <= 1e-10);
  CHECK_THROWS_AS(fit_cost_model(synth(CostModel::heat5(), {4, 4, 8, 8})), RangeError);
}

TEST_CASE("payload regression") {
  auto ex = PayloadRegression::exchange(1, 3);
  CHECK(ex.horizontal(16, 1) == 4 * 2 * 16 * 3);
  CHECK(ex.vertical(16, 1) == 4 * 2 * 16 * 3 + 4 * 4 * 3);
  CHECK(ex.filtered().d1 == 0);
  // generated data with two fabric sizes recovers all coefficients
  PayloadRegression truth{8, 2, 40, 8, 16, 24};
  std::vector<PayloadSample> s;
  for (double F : {10.0, 20.0})
    for (double n : {2.0, 4.0, 8.0}) s.push_back({n, F, truth.horizontal(n, F), truth.vertical(n, F)});
  auto fit = fit_payload(s);
  CHECK(fit.b0 == doctest::Approx(8));
  CHECK(fit.b1 == doctest::Approx(2));
  CHECK(fit.b2 == doctest::Approx(40));
  CHECK(fit.d1 == doctest::Approx(16));
  CHECK(fit.busiest(4, 10) == doctest::Approx(std::max(truth.horizontal(4, 10), truth.vertical(4, 10))));
}

TEST_CASE("cluster prediction") {
  ClusterConfig cfg;
  cfg.cost = CostModel::heat5();
  cfg.payload = PayloadRegression::exchange(1, 1);
  cfg.fabric = 720;
  cfg.bandwidth = 37.5e9;
  cfg.latency_h = cfg.latency_v = 5e-6;
  cfg.n = 4096;
  auto p = predict_cluster(cfg);
  CHECK(p.limiter == "compute");
  CHECK(p.steps_per_second == doctest::Approx(1.0 / cfg.cost.seconds(4096)));
  CHECK(p.flops_per_cycle == doctest::Approx(cfg.cost.flops_per_cycle(4096)));
  cfg.n = 2;
  CHECK(predict_cluster(cfg).limiter == "io");
  const double cross = io_crossover_points(cfg);
  MESSAGE("5-pt IO/compute crossover at " << cross << " points per core");
  CHECK(cross > 128);
  CHECK(cross < 512);
  // the transmit filter moves the crossover down
  cfg.payload = cfg.payload.filtered();
  CHECK(io_crossover_points(cfg) < cross);
  std::ostringstream os;
  write_prediction_curve(os, cfg, {2, 4, 8});
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("prediction matches the simulator across the strong-scale sweep") {
  LinearProgram prog(LinearStencilKernel::heat5(0.1f));
  for (double lat : {0.0, 2e-6, 2e-5}) {
    for (int n : {2, 4, 8, 16, 32, 64}) {
      RunConfig c;
      c.geom = {2, 2, n};
      c.steps = 400;
      c.numerics = false;
      c.timing.enabled = true;
      c.timing.link = {lat, 2e8};
      c.timing.cost = CostModel::heat5();
      auto r = run(prog, GlobalState(2 * n, 2 * n, 1), c);
      ClusterConfig cc;
      cc.cost = CostModel::heat5();
      cc.payload = PayloadRegression::exchange(1, 1);
      cc.n = n;
      cc.bandwidth = 2e8;
      cc.latency_h = cc.latency_v = lat;
      cc.nodes = 4;
      auto p = predict_cluster(cc);
      CAPTURE(n);
      CAPTURE(lat);
      CAPTURE(p.limiter);
      CHECK(r.steps_per_second == doctest::Approx(p.steps_per_second).epsilon(0.05));
    }
  }
}
