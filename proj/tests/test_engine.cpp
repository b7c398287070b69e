#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dtrans/engine.hpp"

using namespace dtrans;

namespace {

GlobalState random_state(int G, int fields, unsigned seed) {
  GlobalState s(G, G, fields);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto &f : s.fields)
    for (auto &x : f) x = u(rng);
  return s;
}

RunConfig config(int wx, int wy, int n, Method m, long steps, int pg = 1) {
  RunConfig c;
  c.geom = {wx, wy, n};
  c.method = {m, pg};
  c.steps = steps;
  return c;
}

}  // namespace

TEST_CASE("zero steps returns the initial condition") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  auto init = random_state(16, 1, 1);
  for (Method m : {Method::Translation, Method::Static, Method::Ghost}) {
    auto r = run(p, init, config(2, 2, 8, m, 0, 2));
    CHECK(r.final_state == init);
  }
}

TEST_CASE("one worker matches the periodic reference") {
  LinearProgram p(LinearStencilKernel::heat9(0.1f, 0.05f));
  auto init = random_state(12, 1, 2);
  auto ref = run_reference(p, init, 17);
  for (Method m : {Method::Translation, Method::Static}) {
    auto r = run(p, init, config(1, 1, 12, m, 17));
    CHECK(count_differences(r.final_state, ref, {0}) == 0);
  }
}

TEST_CASE("2x2 heat5 n=8 over 64 steps is bit-identical to one worker") {
  LinearProgram p(LinearStencilKernel::heat5(0.2f));
  auto init = random_state(16, 1, 3);
  auto ref = run_reference(p, init, 64);
  auto one = run(p, init, config(1, 1, 16, Method::Translation, 64));
  auto four = run(p, init, config(2, 2, 8, Method::Translation, 64));
  CHECK(count_differences(one.final_state, ref, {0}) == 0);
  CHECK(count_differences(four.final_state, ref, {0}) == 0);
}

TEST_CASE("methods agree across worker grids, including non-square ones") {
  LinearProgram p(LinearStencilKernel::heat9(0.1f, 0.05f));
  auto init = random_state(24, 1, 4);
  auto ref = run_reference(p, init, 12);
  for (auto [wx, wy, n] : {std::tuple{2, 2, 12}, std::tuple{3, 3, 8}, std::tuple{4, 4, 6}}) {
    for (Method m : {Method::Translation, Method::Static, Method::Ghost}) {
      CAPTURE(wx);
      CAPTURE(static_cast<int>(m));
      auto c = config(wx, wy, n, m, 12, 3);
      c.poison_halos = true;
      auto r = run(p, init, c);
      CHECK(count_differences(r.final_state, ref, {0}) == 0);
    }
  }
  // rectangular torus
  GlobalState rect(24, 12, 1);
  std::mt19937 rng(5);
  for (auto &x : rect.fields[0]) x = std::uniform_real_distribution<float>(0, 1)(rng);
  auto a = run(p, rect, config(4, 2, 6, Method::Translation, 9));
  auto b = run(p, rect, config(4, 2, 6, Method::Static, 9));
  auto c = run(p, rect, config(2, 1, 12, Method::Ghost, 9, 3));
  CHECK(count_differences(a.final_state, b.final_state, {0}) == 0);
  CHECK(count_differences(a.final_state, c.final_state, {0}) == 0);
}

TEST_CASE("ghost with p_g = 1 equals static") {
  LinearProgram p(LinearStencilKernel::heat5(0.2f));
  auto init = random_state(16, 1, 6);
  auto s = run(p, init, config(2, 2, 8, Method::Static, 10));
  auto g = run(p, init, config(2, 2, 8, Method::Ghost, 10, 1));
  CHECK(count_differences(s.final_state, g.final_state, {0}) == 0);
}

TEST_CASE("reassembly inverts the translation: identity stencil leaves a marker field unchanged") {
  // centre coefficient 1, all others 0
  LinearStencilKernel id{LinearShape::FivePoint, {0, 0, 0, 0, 1}};
  LinearProgram p(id);
  GlobalState init(16, 16, 1);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) init.at(0, i, j) = static_cast<float>(i * 100 + j);
  for (long steps : {1L, 5L, 16L, 23L}) {
    auto r = run(p, init, config(2, 2, 8, Method::Translation, steps));
    CHECK(r.final_state == init);
    CHECK(r.offset.ox == wrap(steps, 16));
  }
}

TEST_CASE("translation traffic is unidirectional") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  auto init = random_state(24, 1, 7);
  auto r = run(p, init, config(3, 3, 8, Method::Translation, 10));
  const Network &net = *r.numerics_network;
  CHECK(net.messages_in(Dir::Left) == 0);
  CHECK(net.messages_in(Dir::Down) == 0);
  CHECK(net.messages_in(Dir::Right) == 9 * 10);
  CHECK(net.messages_in(Dir::Up) == 2 * 9 * 10);  // vertical edge plus forwarded corner
  CHECK(net.total_sent() == net.total_delivered());
  auto s = run(p, init, config(3, 3, 8, Method::Static, 10));
  CHECK(s.numerics_network->messages_in(Dir::Left) == 9 * 10);
}

TEST_CASE("mismatched configuration is rejected") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  auto init = random_state(16, 1, 8);
  CHECK_THROWS_AS(run(p, init, config(2, 2, 4, Method::Translation, 1)), ConfigError);
  CHECK_THROWS_AS(run(p, init, config(16, 16, 1, Method::Static, 1)), ConfigError);  // n < 2r
  CHECK_THROWS_AS(run(p, init, config(2, 2, 8, Method::Ghost, 1, 9)), ConfigError);
  CHECK_THROWS_AS(MethodConfig::parse("diagonal"), ConfigError);
}

// ---------------------------------------------------------------------------
// timing plane

namespace {
RunConfig timed(int wx, int wy, int n, Method m, long steps, double lat, double T, double bw = INFINITY) {
  auto c = config(wx, wy, n, m, steps, 2);
  c.numerics = false;
  c.timing.enabled = true;
  c.timing.link = {lat, bw};
  c.timing.sweep_seconds = T;
  return c;
}
}  // namespace

TEST_CASE("compute-bound translation reproduces 1/T") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  GlobalState init(64, 64, 1);
  auto r = run(p, init, timed(2, 2, 32, Method::Translation, 400, 1e-6, 10e-6));
  CHECK(r.steps_per_second == doctest::Approx(1e5).epsilon(0.01));
  CHECK(r.timing_network->total_sent() == r.timing_network->total_delivered());
  for (const auto &t : r.telemetry)
    for (std::size_t q = 1; q < t.size(); ++q) CHECK(t[q].time > t[q - 1].time);
}

TEST_CASE("pipeline depth: exactly D sweeps before the first arrival when latency is large") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  GlobalState init(64, 64, 1);
  auto r = run(p, init, timed(2, 2, 32, Method::Translation, 100, 1e-3, 1e-6));
  CHECK(r.sweeps_before_first_arrival == 16);
  CHECK(r.max_skew <= 16 + 1);
}

TEST_CASE("static rate is 1/(T + 2 lambda + serialization)") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  GlobalState init(64, 64, 1);
  const double T = 10e-6, lam = 5e-6, bw = 1e9;
  auto r = run(p, init, timed(2, 2, 32, Method::Static, 300, lam, T, bw));
  const double ser = (32.0 * 4 + 34.0 * 4) / bw;
  CHECK(r.steps_per_second == doctest::Approx(1.0 / (T + 2 * lam + ser)).epsilon(0.01));
}

TEST_CASE("weak scaling is exact in virtual time") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  double first = 0;
  for (int k : {2, 4, 6}) {
    GlobalState init(16 * k, 16 * k, 1);
    auto r = run(p, init, timed(k, k, 16, Method::Translation, 300, 10e-6, 2e-6));
    if (first == 0) first = r.steps_per_second;
    CHECK(r.steps_per_second == doctest::Approx(first).epsilon(1e-9));
  }
}

TEST_CASE("deterministic traces") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  GlobalState init(32, 32, 1);
  auto c = timed(2, 2, 16, Method::Translation, 50, 3e-6, 1e-6, 1e8);
  c.timing.trace = true;
  auto a = run(p, init, c);
  auto b = run(p, init, c);
  REQUIRE(a.trace.size() == b.trace.size());
  bool same = true;
  for (std::size_t q = 0; q < a.trace.size(); ++q)
    same = same && a.trace[q].time == b.trace[q].time && a.trace[q].what == b.trace[q].what &&
           a.trace[q].src == b.trace[q].src;
  CHECK(same);
  CHECK(a.end_time == b.end_time);
}

TEST_CASE("ghost timing exchanges once per period") {
  LinearProgram p(LinearStencilKernel::heat5(0.1f));
  GlobalState init(32, 32, 1);
  auto r = run(p, init, timed(2, 2, 16, Method::Ghost, 40, 1e-6, 1e-6));
  CHECK(r.timing_network->messages_in(Dir::Left) == 4 * 20);
}
