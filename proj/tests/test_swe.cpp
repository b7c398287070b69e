#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dtrans/bathymetry.hpp"
#include "dtrans/engine.hpp"

using namespace dtrans;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

RunConfig config(int wx, int wy, int n, Method m, long steps, int pg = 1) {
  RunConfig c;
  c.geom = {wx, wy, n};
  c.method = {m, pg};
  c.steps = steps;
  return c;
}

// Gaussian bump of height amp and width sigma (degrees) centred in the domain.
std::vector<float> bumped(const SweDomain &d, double amp, double sigma_deg, bool lon_only = false) {
  std::vector<float> h(d.b.size(), static_cast<float>(d.sea_level));
  const double clat = d.grid.lat0 + 0.5 * d.gy * d.grid.dlat, clon = d.grid.lon0 + 0.5 * d.gx * d.grid.dlon;
  for (int i = 0; i < d.gy; ++i)
    for (int j = 0; j < d.gx; ++j) {
      const double dy = lon_only ? 0.0 : (d.grid.lat_of_row(i) - clat) / kDeg;
      const double dx = (d.grid.lon_of_col(j) - clon) / kDeg;
      h[d.index(i, j)] += static_cast<float>(amp * std::exp(-(dx * dx + dy * dy) / (2 * sigma_deg * sigma_deg)));
    }
  return h;
}

// A basin with a sloping floor and a small island.
SweDomain island_basin(int G, double dt) {
  auto d = basin_domain(G, G, 8.0, 8.0, 200.0, dt, true);
  for (int i = 1; i < G - 1; ++i)
    for (int j = 1; j < G - 1; ++j) d.b[d.index(i, j)] = static_cast<float>(1.0 + 150.0 * j / G);
  for (int i = G / 2 - 1; i <= G / 2; ++i)
    for (int j = G / 3; j <= G / 3 + 1; ++j) {
      d.land[d.index(i, j)] = 1;
      d.b[d.index(i, j)] = static_cast<float>(d.sea_level + 5.0);
    }
  return d;
}

}  // namespace

TEST_CASE("trig tables") {
  auto t0 = trig_row(0.0);
  CHECK(t0.sin == 0.0f);
  CHECK(t0.cos == 1.0f);
  CHECK(t0.sec == 1.0f);
  auto t60 = trig_row(60 * kDeg);
  CHECK(t60.sin == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(t60.cos == doctest::Approx(0.5));
  CHECK(t60.sec == doctest::Approx(2.0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-85, 85);
  std::vector<double> lats;
  for (int k = 0; k < 1000; ++k) lats.push_back(U(rng) * kDeg);
  auto tab = build_trig_tables(lats, 0.001);
  double worst = 0;
  for (std::size_t k = 0; k < lats.size(); ++k) {
    worst = std::max(worst, std::abs(tab.grid[k].sin - std::sin(lats[k])));
    worst = std::max(worst, std::abs(tab.grid[k].cos - std::cos(lats[k])));
  }
  CHECK(worst <= 1e-6);
  CHECK_THROWS_AS(build_trig_tables({90 * kDeg}, 0.01), RangeError);
}

TEST_CASE("flop counts") {
  CHECK(LinearProgram(LinearStencilKernel::heat5(0.1f)).flops_per_point(0) == 9);
  CHECK(LinearProgram(LinearStencilKernel::heat9(0.1f, 0.05f)).flops_per_point(0) == 17);
  SweProgram p(basin_domain(8, 8, 1, 1, 10, 1, false).grid);
  MESSAGE("swe even " << p.flops_per_point(0) << " odd " << p.flops_per_point(1));
  CHECK(p.flops_per_point(0) > 0);
  CHECK(p.flops_per_point(1) > 0);
}

TEST_CASE("lake at rest with coastline and island is exact") {
  auto d = island_basin(16, 60.0);
  SweProgram p(d.grid);
  auto init = swe_rest_state(d);
  auto r = run(p, init, config(2, 2, 8, Method::Translation, 500));
  double worst = 0;
  for (int i = 0; i < d.gy; ++i)
    for (int j = 0; j < d.gx; ++j) {
      worst = std::max(worst, static_cast<double>(std::abs(r.final_state.at(swe::H, i, j) - init.at(swe::H, i, j))));
      worst = std::max(worst, static_cast<double>(std::abs(r.final_state.at(swe::U, i, j))));
      worst = std::max(worst, static_cast<double>(std::abs(r.final_state.at(swe::V, i, j))));
    }
  CHECK(worst <= 1e-6);
}

TEST_CASE("swe partition invariance across methods") {
  auto d = island_basin(24, 60.0);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 2.0, 1.0));
  auto ref = run_reference(p, init, 30);
  const std::vector<int> state{swe::U, swe::V, swe::H};
  for (auto [w, n] : {std::pair{1, 24}, std::pair{2, 12}, std::pair{3, 8}, std::pair{4, 6}}) {
    for (Method m : {Method::Translation, Method::Static, Method::Ghost}) {
      CAPTURE(w);
      CAPTURE(static_cast<int>(m));
      auto c = config(w, w, n, m, 30, 3);
      c.poison_halos = true;
      auto r = run(p, init, c);
      CHECK(count_differences(r.final_state, ref, state) == 0);
    }
  }
}

TEST_CASE("translation carries the constants with the grid") {
  auto d = island_basin(16, 60.0);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 1.0, 1.0));
  auto r = run(p, init, config(2, 2, 8, Method::Translation, 7));
  for (int f : {swe::B, swe::LAND, swe::SINP, swe::SECP, swe::BC, swe::COSC})
    CHECK(r.final_state.fields[f] == init.fields[f]);
}

TEST_CASE("land stays dry and still") {
  auto d = island_basin(16, 60.0);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 5.0, 1.0));
  auto r = run(p, init, config(2, 2, 8, Method::Static, 200));
  for (int i = 0; i < d.gy; ++i)
    for (int j = 0; j < d.gx; ++j)
      if (d.land[d.index(i, j)]) {
        CHECK(r.final_state.at(swe::U, i, j) == 0.0f);
        CHECK(r.final_state.at(swe::H, i, j) == d.b[d.index(i, j)]);
      }
}

TEST_CASE("mass is conserved in a closed basin") {
  auto d = island_basin(16, 60.0);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 5.0, 1.0));
  auto r = run(p, init, config(1, 1, 16, Method::Translation, 1000));
  const double m0 = swe_mass(d, init), m1 = swe_mass(d, r.final_state);
  CHECK(std::abs(m1 - m0) / m0 <= 1e-5);
}

TEST_CASE("instability is reported") {
  auto d = basin_domain(16, 16, 2.0, 2.0, 4000.0, 2000.0, false);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 50.0, 0.2));
  CHECK(swe_cfl(d.grid, 4000.0, 1 * kDeg) > 1.0);
  CHECK_THROWS_AS(run(p, init, config(2, 2, 8, Method::Translation, 400)), InstabilityError);
}

TEST_CASE("land mask helper") {
  auto d = basin_domain(8, 8, 1, 1, 10, 1, false);
  auto s = swe_rest_state(d);
  FieldSet f(swe::COUNT, HaloField(4, 2));
  for (auto &x : f) x.fill(1.0f);
  f[swe::B].fill(0.5f);
  apply_land_mask(f);
  CHECK(f[swe::U].at(3, 3) == 0.0f);
  CHECK(f[swe::H].at(3, 3) == 0.5f);
  f[swe::LAND].fill(0.0f);
  f[swe::U].fill(2.0f);
  apply_land_mask(f);
  CHECK(f[swe::U].at(3, 3) == 2.0f);
}

namespace {

// h - sea level on a G x G periodic patch after t_end seconds.
std::vector<double> hump_run(int G, double dt, double t_end) {
  SweConstants k;
  auto d = basin_domain(G, G, 10.0, 10.0, 100.0, dt, false, k);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 1.0, 1.0));
  const long steps = std::lround(t_end / dt);
  const int w = G >= 64 ? 4 : 2;
  auto r = run(p, init, config(w, w, G / w, Method::Translation, steps));
  std::vector<double> h(d.b.size());
  for (std::size_t q = 0; q < h.size(); ++q) h[q] = r.final_state.fields[swe::H][q] - d.sea_level;
  return h;
}

double coarse_diff(const std::vector<double> &c, int Gc, const std::vector<double> &f) {
  const int Gf = 2 * Gc;
  double s = 0;
  for (int i = 0; i < Gc; ++i)
    for (int j = 0; j < Gc; ++j) {
      const double e = c[static_cast<std::size_t>(i) * Gc + j] - f[static_cast<std::size_t>(2 * i) * Gf + 2 * j];
      s += e * e;
    }
  return std::sqrt(s / (Gc * Gc));
}

}  // namespace

TEST_CASE("self-convergence is second order") {
  const double t_end = 7200;
  auto h32 = hump_run(32, 240, t_end);
  auto h64 = hump_run(64, 120, t_end);
  auto h128 = hump_run(128, 60, t_end);
  const double e1 = coarse_diff(h32, 32, h64), e2 = coarse_diff(h64, 64, h128);
  const double order = std::log2(e1 / e2);
  MESSAGE("errors " << e1 << " " << e2 << " order " << order);
  CHECK(order == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("gravity waves travel at sqrt(g s0)") {
  SweConstants k;
  k.omega = 0;
  const int G = 256;
  const double depth = 50.0;
  auto d = basin_domain(G, 8, 20.0, 0.5, depth, 20.0, false, k);
  SweProgram p(d.grid);
  auto init = swe_state(d, bumped(d, 0.05, 0.6, true));
  const int row = 4;
  auto crest = [&](const GlobalState &s) {
    int best = G / 2;
    for (int j = G / 2; j < G; ++j)
      if (s.at(swe::H, row, j) > s.at(swe::H, row, best)) best = j;
    // parabolic refinement
    const double a = s.at(swe::H, row, best - 1), b = s.at(swe::H, row, best), c = s.at(swe::H, row, best + 1);
    return best + 0.5 * (a - c) / (a - 2 * b + c);
  };
  auto r1 = run(p, init, config(32, 1, 8, Method::Translation, 400));
  auto r2 = run(p, init, config(32, 1, 8, Method::Translation, 800));
  const double dx = d.grid.k.radius * std::cos(d.grid.lat_of_row(row)) * d.grid.dlon;
  const double speed = (crest(r2.final_state) - crest(r1.final_state)) * dx / (400 * 20.0);
  MESSAGE("speed " << speed << " expected " << std::sqrt(k.g * depth));
  CHECK(speed == doctest::Approx(std::sqrt(k.g * depth)).epsilon(0.05));
}
