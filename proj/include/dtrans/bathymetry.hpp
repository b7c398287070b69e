#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtrans/engine.hpp"
#include "dtrans/kernels.hpp"

namespace dtrans {

// Elevation raster in metres (negative below sea level). Row 0 is the
// southernmost row; columns run eastward from lon_min.
struct BathymetryRaster {
  int rows = 0, cols = 0;
  double lat_min = -85, lat_max = 85;  // degrees, cell edges
  double lon_min = -180, lon_max = 180;
  double nodata = -9999;
  std::vector<float> elevation;

  float at(int i, int j) const { return elevation[static_cast<std::size_t>(i) * cols + j]; }
  float &at(int i, int j) { return elevation[static_cast<std::size_t>(i) * cols + j]; }
  double cell_lat() const { return (lat_max - lat_min) / rows; }
  double cell_lon() const { return (lon_max - lon_min) / cols; }
  void validate() const;
};

// ESRI ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize (or dx and
// dy), nodata_value, then rows from north to south.
BathymetryRaster load_esri_ascii(const std::string &path);
void save_esri_ascii(const BathymetryRaster &r, const std::string &path);

// Flat binary: "DTBATHY1", int32 rows, int32 cols, 5 doubles (lat_min,
// lat_max, lon_min, lon_max, nodata), then float32 values south to north.
BathymetryRaster load_flat_binary(const std::string &path);
void save_flat_binary(const BathymetryRaster &r, const std::string &path);

// Picks the reader from the extension (.asc or .bin).
BathymetryRaster load_bathymetry(const std::string &path);

// Area average onto rows x cols. Each side must divide evenly. Nodata cells
// are left out of the average; a cell with no data counts as land at 0 m.
BathymetryRaster resample(const BathymetryRaster &r, int rows, int cols);

// Latitude bounds are clamped to (-85, 85) by dropping rows outside.
BathymetryRaster clamp_latitudes(const BathymetryRaster &r, double limit_deg = 85.0);

// Earth-like test topography: smooth continents from seeded random bumps,
// ocean basins down to about -6000 m, land caps poleward of +-cap_deg.
BathymetryRaster synthetic_bathymetry(int cols = 1024, int rows = 512, unsigned seed = 1, double cap_deg = 75.0);

// Static description of an SWE domain on the run grid.
struct SweDomain {
  SweGrid grid;
  int gx = 0, gy = 0;
  std::vector<float> b;              // height above the reference sphere
  std::vector<std::uint8_t> land;    // 1 where elevation >= 0
  double reference = 0;              // elevation of the reference sphere (m)
  double sea_level = 0;              // still-water h

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * gx + j; }
};

// Builds the domain from a raster already at the run resolution. The
// reference sphere sits 1 m below the lowest point.
SweDomain make_domain(const BathymetryRaster &r, double dt, const SweConstants &k = {});

// Uniform-depth test basin centred on the equator: gx x gy points spanning
// lon_span x lat_span degrees with point 0 on the south-west corner. With
// walls, the outermost row and column are land so the basin is closed.
SweDomain basin_domain(int gx, int gy, double lon_span_deg, double lat_span_deg, double depth, double dt,
                       bool walls, const SweConstants &k = {});

// All SWE fields on the torus. h is given per point; land points get h = b
// and zero velocity.
GlobalState swe_state(const SweDomain &d, const std::vector<float> &h, const std::vector<float> &u = {},
                      const std::vector<float> &v = {});
// Fluid at rest at sea level.
GlobalState swe_rest_state(const SweDomain &d);

// Sum of depth * cos(lat) over water points: proportional to water volume.
double swe_mass(const SweDomain &d, const GlobalState &s);
// Water volume in m^3 above `level`, summed over water points.
double swe_volume_above(const SweDomain &d, const GlobalState &s, double level);

struct ImpactHump {
  double lat_deg = 0, lon_deg = 0;
  double area = 3.0e10;  // m^2, footprint at half the peak height
  double peak = 200.0;   // m
  int subsamples = 16;   // per cell edge for cell averages
};

struct HumpReport {
  double radius = 0;             // support radius (m)
  double volume_analytic = 0;    // m^3
  double volume_quadrature = 0;  // radial numerical integral
  double volume_grid = 0;        // as deposited on the grid
  double energy_analytic = 0;    // J, rho g z^2 / 2 over the footprint
  double energy_quadrature = 0;  // J
  double energy_mt = 0;          // megatons TNT
};

// Raised cosine profile z = peak * cos(pi rho / 2R) for rho < R, R chosen so
// the half-peak footprint has the configured area. Adds cell averages of z
// to h at water points.
HumpReport place_impact_hump(GlobalState &s, const SweDomain &d, const ImpactHump &hump, double rho_water = 1025.0);

// Closed-form and quadrature values of the profile without touching a grid.
HumpReport hump_profile_report(const ImpactHump &hump, double g = 9.80665, double rho_water = 1025.0);

}  // namespace dtrans
