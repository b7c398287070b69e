#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dtrans/bathymetry.hpp"

using namespace dtrans;
namespace fs = std::filesystem;

namespace {

BathymetryRaster raster(int rows, int cols, float fill = -1000.0f) {
  BathymetryRaster r;
  r.rows = rows;
  r.cols = cols;
  r.lat_min = -40;
  r.lat_max = 40;
  r.lon_min = -180;
  r.lon_max = 180;
  r.elevation.assign(static_cast<std::size_t>(rows) * cols, fill);
  return r;
}

fs::path tmpdir() {
  auto p = fs::temp_directory_path() / "dtrans_bathy_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("all-ocean constant depth") {
  auto d = make_domain(raster(8, 16, -500.0f), 10.0);
  for (auto l : d.land) CHECK(l == 0);
  for (float b : d.b) CHECK(b == d.b[0]);
  CHECK(d.sea_level == doctest::Approx(501.0));
  CHECK(d.sea_level - d.b[0] == doctest::Approx(500.0));
}

TEST_CASE("checkerboard land survives an identity resample") {
  auto r = raster(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) r.at(i, j) = ((i + j) % 2) ? 100.0f : -100.0f;
  auto same = resample(r, 8, 8);
  CHECK(same.elevation == r.elevation);
  auto d = make_domain(same, 1.0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(d.land[d.index(i, j)] == ((i + j) % 2));
}

TEST_CASE("2x downsampling averages four cells") {
  auto r = raster(4, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) r.at(i, j) = static_cast<float>(3 * i + 2 * j - 50);
  auto h = resample(r, 2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) {
      const double mean = 0.25 * (r.at(2 * i, 2 * j) + r.at(2 * i + 1, 2 * j) + r.at(2 * i, 2 * j + 1) +
                                  r.at(2 * i + 1, 2 * j + 1));
      CHECK(h.at(i, j) == doctest::Approx(mean));
    }
  CHECK(h.lat_min == r.lat_min);
  CHECK(h.lon_max == r.lon_max);
  CHECK_THROWS_AS(resample(r, 3, 4), RangeError);
}

TEST_CASE("nodata is skipped in the average") {
  auto r = raster(2, 2);
  r.at(0, 0) = -9999.0f;
  r.at(0, 1) = -100.0f;
  r.at(1, 0) = -200.0f;
  r.at(1, 1) = -300.0f;
  CHECK(resample(r, 1, 1).at(0, 0) == doctest::Approx(-200.0));
}

TEST_CASE("latitude clamping drops polar rows") {
  auto r = raster(18, 4);
  r.lat_min = -90;
  r.lat_max = 90;
  auto c = clamp_latitudes(r, 85.0);
  CHECK(c.rows == 16);
  CHECK(c.lat_min == doctest::Approx(-80.0));
  CHECK(c.lat_max == doctest::Approx(80.0));
  CHECK_THROWS_AS(make_domain(r, 1.0), RangeError);
}

TEST_CASE("ASCII and binary round trips") {
  auto r = raster(6, 10);
  for (std::size_t q = 0; q < r.elevation.size(); ++q) r.elevation[q] = static_cast<float>(q) * 1.25f - 40.0f;
  r.elevation[7] = -9999.0f;
  const auto dir = tmpdir();
  for (const char *name : {"r.asc", "r.bin"}) {
    const auto path = (dir / name).string();
    if (std::string(name).ends_with(".asc"))
      save_esri_ascii(r, path);
    else
      save_flat_binary(r, path);
    auto back = load_bathymetry(path);
    CAPTURE(name);
    CHECK(back.rows == r.rows);
    CHECK(back.cols == r.cols);
    CHECK(back.elevation == r.elevation);
    CHECK(back.lat_min == doctest::Approx(r.lat_min));
    CHECK(back.lat_max == doctest::Approx(r.lat_max));
    CHECK(back.lon_max == doctest::Approx(r.lon_max));
    CHECK(back.nodata == r.nodata);
  }
  CHECK_THROWS_AS(load_bathymetry((dir / "missing.asc").string()), IoError);
}

TEST_CASE("malformed ASCII headers are rejected") {
  const auto p = (tmpdir() / "bad.asc").string();
  {
    std::ofstream(p) << "ncols 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
  }
  CHECK_THROWS_AS(load_esri_ascii(p), IoError);
  {
    std::ofstream(p) << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 2\n3\n";
  }
  CHECK_THROWS_AS(load_esri_ascii(p), IoError);
  {
    std::ofstream(p) << "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 -2\n";
  }
  auto ok = load_esri_ascii(p);
  CHECK(ok.at(0, 1) == -2.0f);
}

TEST_CASE("synthetic Earth-like raster") {
  auto r = synthetic_bathymetry();
  CHECK(r.cols == 1024);
  CHECK(r.rows == 512);
  CHECK(r.lat_min == -85.0);
  long land = 0;
  float lowest = 0;
  for (float z : r.elevation) {
    land += z >= 0;
    lowest = std::min(lowest, z);
  }
  const double frac = static_cast<double>(land) / static_cast<double>(r.elevation.size());
  MESSAGE("land fraction " << frac << ", deepest " << lowest);
  CHECK(frac > 0.15);
  CHECK(frac < 0.5);
  CHECK(lowest < -4000.0f);
  // polar caps are land, the open North Pacific is water
  for (int j = 0; j < r.cols; j += 37) CHECK(r.at(r.rows - 1, j) >= 0.0f);
  const int i = static_cast<int>((30.0 - r.lat_min) / r.cell_lat());
  const int j = static_cast<int>((-140.0 - r.lon_min) / r.cell_lon());
  CHECK(r.at(i, j) < -1000.0f);
  CHECK(synthetic_bathymetry(1024, 512, 1).elevation == r.elevation);
  CHECK(synthetic_bathymetry(1024, 512, 2).elevation != r.elevation);
}

// ---------------------------------------------------------------------------
// impact hump

TEST_CASE("zero-height hump leaves the state unchanged") {
  auto d = make_domain(resample(synthetic_bathymetry(), 128, 256), 10.0);
  auto s = swe_rest_state(d);
  auto before = s;
  ImpactHump h{30, -140, 3e10, 0.0};
  place_impact_hump(s, d, h);
  CHECK(s == before);
}

TEST_CASE("the configured hump holds about 5.8e12 m^3") {
  ImpactHump h{30, -140};
  auto rep = hump_profile_report(h);
  MESSAGE("radius " << rep.radius << " m, analytic " << rep.volume_analytic << ", quadrature " << rep.volume_quadrature);
  CHECK(rep.volume_quadrature == doctest::Approx(rep.volume_analytic).epsilon(1e-6));
  CHECK(rep.volume_analytic == doctest::Approx(5.8e12).epsilon(0.10));
  CHECK(rep.energy_quadrature == doctest::Approx(rep.energy_analytic).epsilon(1e-6));

  auto d = make_domain(resample(synthetic_bathymetry(), 256, 512), 10.0);
  auto s = swe_rest_state(d);
  auto placed = place_impact_hump(s, d, h);
  MESSAGE("on the 512x256 grid " << placed.volume_grid);
  CHECK(placed.volume_grid == doctest::Approx(rep.volume_analytic).epsilon(0.02));
  CHECK(swe_volume_above(d, s, d.sea_level) == doctest::Approx(placed.volume_grid).epsilon(1e-3));
}

TEST_CASE("hump on land is rejected") {
  auto d = make_domain(resample(synthetic_bathymetry(), 128, 256), 10.0);
  auto s = swe_rest_state(d);
  CHECK_THROWS_AS(place_impact_hump(s, d, ImpactHump{84.0, 0.0}), ConfigError);
}

// The target impact energy (2.4 Mt TNT, 90% into potential energy) is about
// three orders of magnitude below the potential energy of any 200 m hump over
// 30,000 km^2, so this comparison is expected to fail. Kept as a record.
TEST_CASE("hump potential energy against half of 0.9 x 2.4 Mt" * doctest::should_fail()) {
  auto rep = hump_profile_report(ImpactHump{30, -140});
  MESSAGE("energy " << rep.energy_analytic << " J = " << rep.energy_mt << " Mt");
  CHECK(rep.energy_mt == doctest::Approx(0.5 * 2.4 * 0.9).epsilon(0.15));
}
