#include "dtrans/bathymetry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "point_ops.hpp"

namespace dtrans {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMegatonJ = 4.184e15;

bool ends_with(const std::string &s, const std::string &suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// Great-circle distance in radians.
double arc(double lat1, double lon1, double lat2, double lon2) {
  const double s1 = std::sin(0.5 * (lat2 - lat1)), s2 = std::sin(0.5 * (lon2 - lon1));
  const double a = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace

void BathymetryRaster::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("bathymetry raster must have at least one row and column");
  if (elevation.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw IoError("bathymetry raster has " + std::to_string(elevation.size()) + " values, expected " +
                  std::to_string(static_cast<long>(rows) * cols));
  if (!(lat_max > lat_min) || !(lon_max > lon_min)) throw ConfigError("bathymetry bounds are empty");
}

BathymetryRaster load_esri_ascii(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bathymetry file " + path);
  std::map<std::string, double> hdr;
  std::string key;
  // header lines until the first number, keys case-insensitive; GDAL writes
  // dx/dy instead of cellsize for non-square cells
  for (int line = 1;; ++line) {
    in >> std::ws;
    const int c = in.peek();
    if (c == EOF || !std::isalpha(c)) break;
    double v = 0;
    if (!(in >> key >> v)) throw IoError(path + ": malformed ASCII grid header at line " + std::to_string(line));
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
    hdr[key] = v;
  }
  if (hdr.count("cellsize")) hdr["dx"] = hdr["dy"] = hdr["cellsize"];
  for (const char *need : {"ncols", "nrows", "dx", "dy"})
    if (!hdr.count(need)) throw IoError(path + std::string(": header lacks ") + (need[0] == 'd' ? "cellsize" : need));
  BathymetryRaster r;
  r.cols = static_cast<int>(hdr["ncols"]);
  r.rows = static_cast<int>(hdr["nrows"]);
  const double dx = hdr["dx"], dy = hdr["dy"];
  const double x0 = hdr.count("xllcorner") ? hdr["xllcorner"] : hdr["xllcenter"] - 0.5 * dx;
  const double y0 = hdr.count("yllcorner") ? hdr["yllcorner"] : hdr["yllcenter"] - 0.5 * dy;
  r.nodata = hdr.count("nodata_value") ? hdr["nodata_value"] : -9999.0;
  if (r.rows < 1 || r.cols < 1 || !(dx > 0) || !(dy > 0)) throw IoError(path + ": header has non-positive dimensions");
  r.lon_min = x0;
  r.lon_max = x0 + dx * r.cols;
  r.lat_min = y0;
  r.lat_max = y0 + dy * r.rows;
  r.elevation.assign(static_cast<std::size_t>(r.rows) * r.cols, 0.0f);
  for (int i = r.rows - 1; i >= 0; --i)
    for (int j = 0; j < r.cols; ++j) {
      double v;
      if (!(in >> v)) throw IoError(path + ": expected " + std::to_string(static_cast<long>(r.rows) * r.cols) + " values");
      r.at(i, j) = static_cast<float>(v);
    }
  r.validate();
  return r;
}

void save_esri_ascii(const BathymetryRaster &r, const std::string &path) {
  r.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "ncols " << r.cols << "\nnrows " << r.rows << "\nxllcorner " << r.lon_min << "\nyllcorner " << r.lat_min;
  if (r.cell_lon() == r.cell_lat())
    out << "\ncellsize " << r.cell_lon();
  else
    out << "\ndx " << r.cell_lon() << "\ndy " << r.cell_lat();
  out << "\nNODATA_value " << r.nodata << '\n';
  out.precision(9);
  for (int i = r.rows - 1; i >= 0; --i) {
    for (int j = 0; j < r.cols; ++j) out << (j ? " " : "") << r.at(i, j);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

BathymetryRaster load_flat_binary(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bathymetry file " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "DTBATHY1", 8) != 0) throw IoError(path + ": not a flat bathymetry file");
  std::int32_t dims[2];
  double b[5];
  in.read(reinterpret_cast<char *>(dims), sizeof dims);
  in.read(reinterpret_cast<char *>(b), sizeof b);
  if (!in) throw IoError(path + ": truncated header");
  BathymetryRaster r;
  r.rows = dims[0];
  r.cols = dims[1];
  r.lat_min = b[0];
  r.lat_max = b[1];
  r.lon_min = b[2];
  r.lon_max = b[3];
  r.nodata = b[4];
  if (r.rows < 1 || r.cols < 1) throw IoError(path + ": bad dimensions");
  r.elevation.resize(static_cast<std::size_t>(r.rows) * r.cols);
  in.read(reinterpret_cast<char *>(r.elevation.data()), static_cast<std::streamsize>(r.elevation.size() * 4));
  if (!in) throw IoError(path + ": truncated data");
  r.validate();
  return r;
}

void save_flat_binary(const BathymetryRaster &r, const std::string &path) {
  r.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const std::int32_t dims[2] = {r.rows, r.cols};
  const double b[5] = {r.lat_min, r.lat_max, r.lon_min, r.lon_max, r.nodata};
  out.write("DTBATHY1", 8);
  out.write(reinterpret_cast<const char *>(dims), sizeof dims);
  out.write(reinterpret_cast<const char *>(b), sizeof b);
  out.write(reinterpret_cast<const char *>(r.elevation.data()), static_cast<std::streamsize>(r.elevation.size() * 4));
  if (!out) throw IoError("write failed for " + path);
}

BathymetryRaster load_bathymetry(const std::string &path) {
  if (ends_with(path, ".asc")) return load_esri_ascii(path);
  if (ends_with(path, ".bin")) return load_flat_binary(path);
  throw ConfigError("unknown bathymetry format for " + path + " (expected .asc or .bin)");
}

BathymetryRaster resample(const BathymetryRaster &r, int rows, int cols) {
  r.validate();
  if (rows < 1 || cols < 1) throw ConfigError("resample target must be at least 1x1");
  if (rows > r.rows || cols > r.cols || r.rows % rows != 0 || r.cols % cols != 0)
    throw RangeError("cannot area-average " + std::to_string(r.cols) + "x" + std::to_string(r.rows) + " onto " +
                     std::to_string(cols) + "x" + std::to_string(rows) + ": sides must divide evenly");
  const int fy = r.rows / rows, fx = r.cols / cols;
  BathymetryRaster o = r;
  o.rows = rows;
  o.cols = cols;
  o.elevation.assign(static_cast<std::size_t>(rows) * cols, 0.0f);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double sum = 0;
      int cnt = 0;
      for (int a = 0; a < fy; ++a)
        for (int b = 0; b < fx; ++b) {
          const float v = r.at(i * fy + a, j * fx + b);
          if (v == static_cast<float>(r.nodata)) continue;
          sum += v;
          ++cnt;
        }
      o.at(i, j) = cnt ? static_cast<float>(sum / cnt) : 0.0f;
    }
  return o;
}

BathymetryRaster clamp_latitudes(const BathymetryRaster &r, double limit) {
  r.validate();
  const double d = r.cell_lat();
  int lo = 0, hi = r.rows;
  while (lo < hi && r.lat_min + lo * d < -limit - 1e-9) ++lo;
  while (hi > lo && r.lat_min + hi * d > limit + 1e-9) --hi;
  if (hi <= lo) throw RangeError("raster lies entirely poleward of the latitude limit");
  BathymetryRaster o = r;
  o.rows = hi - lo;
  o.lat_min = r.lat_min + lo * d;
  o.lat_max = r.lat_min + hi * d;
  o.elevation.assign(r.elevation.begin() + static_cast<std::ptrdiff_t>(lo) * r.cols,
                     r.elevation.begin() + static_cast<std::ptrdiff_t>(hi) * r.cols);
  return o;
}

BathymetryRaster synthetic_bathymetry(int cols, int rows, unsigned seed, double cap_deg) {
  if (cols < 4 || rows < 4) throw ConfigError("synthetic bathymetry needs at least 4x4 cells");
  struct Blob {
    double lat, lon, radius_km, height;
  };
  // rough continents; the central Pacific stays open
  std::vector<Blob> blobs = {
      {45, -100, 2500, 5200}, {-15, -60, 2200, 5000}, {50, 60, 3500, 5200}, {5, 20, 2600, 5000},
      {-25, 135, 1500, 4800}, {30, 100, 2400, 5000},  {65, -40, 1000, 4600},
  };
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 24; ++k) {
    // islands and seamounts, kept out of the open Pacific box
    double lon = -180 + 360 * U(rng);
    if (lon < -120 || lon > 170) lon = -20 + 100 * U(rng);
    blobs.push_back({-60 + 120 * U(rng), lon, 150 + 600 * U(rng), 1500 + 3500 * U(rng)});
  }
  BathymetryRaster r;
  r.rows = rows;
  r.cols = cols;
  r.lat_min = -85;
  r.lat_max = 85;
  r.lon_min = -180;
  r.lon_max = 180;
  r.elevation.resize(static_cast<std::size_t>(rows) * cols);
  const double radius_km = 6371.0;
  for (int i = 0; i < rows; ++i) {
    const double lat = r.lat_min + (i + 0.5) * r.cell_lat();
    for (int j = 0; j < cols; ++j) {
      const double lon = r.lon_min + (j + 0.5) * r.cell_lon();
      double z = -4500.0 + 700.0 * std::cos(3 * lon * kDeg) * std::sin(2 * lat * kDeg);
      for (const auto &b : blobs) {
        const double d = radius_km * arc(lat * kDeg, lon * kDeg, b.lat * kDeg, b.lon * kDeg);
        z += b.height * std::exp(-0.5 * (d / b.radius_km) * (d / b.radius_km));
      }
      if (std::abs(lat) >= cap_deg) z = std::max(z, 300.0);
      r.at(i, j) = static_cast<float>(z);
    }
  }
  return r;
}

SweDomain make_domain(const BathymetryRaster &r, double dt, const SweConstants &k) {
  r.validate();
  if (r.lat_min <= -90 || r.lat_max >= 90) throw RangeError("bathymetry must exclude the poles; clamp it first");
  SweDomain d;
  d.gx = r.cols;
  d.gy = r.rows;
  d.grid.k = k;
  d.grid.dt = dt;
  d.grid.dlat = r.cell_lat() * kDeg;
  d.grid.dlon = r.cell_lon() * kDeg;
  d.grid.lat0 = (r.lat_min + 0.5 * r.cell_lat()) * kDeg;
  d.grid.lon0 = (r.lon_min + 0.5 * r.cell_lon()) * kDeg;
  float lowest = std::numeric_limits<float>::infinity();
  for (float z : r.elevation)
    if (z != static_cast<float>(r.nodata)) lowest = std::min(lowest, z);
  if (!std::isfinite(lowest)) lowest = 0;
  d.reference = static_cast<double>(lowest) - 1.0;
  d.sea_level = -d.reference;
  d.b.resize(r.elevation.size());
  d.land.resize(r.elevation.size());
  for (std::size_t q = 0; q < r.elevation.size(); ++q) {
    const double z = r.elevation[q] == static_cast<float>(r.nodata) ? 0.0 : r.elevation[q];
    d.land[q] = z >= 0.0 ? 1 : 0;
    d.b[q] = static_cast<float>(z - d.reference);
  }
  return d;
}

SweDomain basin_domain(int gx, int gy, double lon_span, double lat_span, double depth, double dt, bool walls,
                       const SweConstants &k) {
  if (gx < 4 || gy < 4 || !(depth > 0)) throw ConfigError("basin needs at least 4x4 points and positive depth");
  SweDomain d;
  d.gx = gx;
  d.gy = gy;
  d.grid.k = k;
  d.grid.dt = dt;
  d.grid.dlat = lat_span / gy * kDeg;
  d.grid.dlon = lon_span / gx * kDeg;
  d.grid.lat0 = -0.5 * lat_span * kDeg;
  d.grid.lon0 = 0.0;
  d.reference = -depth - 1.0;
  d.sea_level = depth + 1.0;
  d.b.assign(static_cast<std::size_t>(gx) * gy, 1.0f);
  d.land.assign(d.b.size(), 0);
  if (walls) {
    for (int i = 0; i < gy; ++i)
      for (int j = 0; j < gx; ++j)
        if (i == 0 || j == 0 || i == gy - 1 || j == gx - 1) {
          d.land[d.index(i, j)] = 1;
          d.b[d.index(i, j)] = static_cast<float>(d.sea_level + 10.0);
        }
  }
  return d;
}

GlobalState swe_state(const SweDomain &d, const std::vector<float> &h, const std::vector<float> &u,
                      const std::vector<float> &v) {
  using namespace swe;
  const std::size_t N = static_cast<std::size_t>(d.gx) * d.gy;
  if (h.size() != N || (!u.empty() && u.size() != N) || (!v.empty() && v.size() != N))
    throw RangeError("SWE initial fields do not match the domain size");
  GlobalState s(d.gx, d.gy, COUNT);
  const auto &g = d.grid;
  for (int i = 0; i < d.gy; ++i) {
    const TrigRow tp = trig_row(g.lat_of_row(i));
    const TrigRow tc = trig_row(g.lat_of_row(i - 0.5));
    for (int j = 0; j < d.gx; ++j) {
      const std::size_t q = d.index(i, j);
      const bool land = d.land[q] != 0;
      s.at(U, i, j) = land || u.empty() ? 0.0f : u[q];
      s.at(V, i, j) = land || v.empty() ? 0.0f : v[q];
      s.at(H, i, j) = land ? d.b[q] : h[q];
      s.at(B, i, j) = d.b[q];
      s.at(LAND, i, j) = land ? 1.0f : 0.0f;
      s.at(SINP, i, j) = tp.sin;
      s.at(COSP, i, j) = tp.cos;
      s.at(SECP, i, j) = tp.sec;
      s.at(SINC, i, j) = tc.sin;
      s.at(COSC, i, j) = tc.cos;
      s.at(SECC, i, j) = tc.sec;
      // cell (i, j) has corners (i-1..i, j-1..j), wrapping on the torus
      const int im = static_cast<int>(wrap(i - 1, d.gy)), jm = static_cast<int>(wrap(j - 1, d.gx));
      s.at(BC, i, j) = detail::avg4(d.b[d.index(im, jm)], d.b[d.index(im, j)], d.b[d.index(i, jm)], d.b[q], 0.25f);
    }
  }
  return s;
}

GlobalState swe_rest_state(const SweDomain &d) {
  return swe_state(d, std::vector<float>(d.b.size(), static_cast<float>(d.sea_level)));
}

double swe_mass(const SweDomain &d, const GlobalState &s) {
  double m = 0;
  for (int i = 0; i < d.gy; ++i) {
    const double c = std::cos(d.grid.lat_of_row(i));
    for (int j = 0; j < d.gx; ++j) {
      if (d.land[d.index(i, j)]) continue;
      m += (static_cast<double>(s.at(swe::H, i, j)) - s.at(swe::B, i, j)) * c;
    }
  }
  return m;
}

double swe_volume_above(const SweDomain &d, const GlobalState &s, double level) {
  const double a = d.grid.k.radius;
  double v = 0;
  for (int i = 0; i < d.gy; ++i) {
    const double area = a * a * std::cos(d.grid.lat_of_row(i)) * d.grid.dlat * d.grid.dlon;
    for (int j = 0; j < d.gx; ++j) {
      if (d.land[d.index(i, j)]) continue;
      v += (static_cast<double>(s.at(swe::H, i, j)) - level) * area;
    }
  }
  return v;
}

namespace {

double support_radius(const ImpactHump &h) {
  // half peak where cos(pi rho / 2R) = 1/2, i.e. rho = 2R/3
  return 1.5 * std::sqrt(h.area / std::numbers::pi);
}

double profile(double rho, double R, double peak) {
  return rho < R ? peak * std::cos(0.5 * std::numbers::pi * rho / R) : 0.0;
}

}  // namespace

HumpReport hump_profile_report(const ImpactHump &h, double g, double rho_w) {
  if (h.area < 0 || h.peak < 0) throw ConfigError("hump area and peak must be >= 0");
  HumpReport r;
  const double pi = std::numbers::pi;
  const double R = support_radius(h);
  r.radius = R;
  r.volume_analytic = h.peak * R * R * (4.0 - 8.0 / pi);
  r.energy_analytic = rho_w * g * h.peak * h.peak * pi * R * R * (0.25 - 1.0 / (pi * pi));
  // midpoint rule on the radial integrals
  const int N = 20000;
  double vol = 0, en = 0;
  for (int k = 0; k < N; ++k) {
    const double rho = (k + 0.5) * R / N;
    const double z = profile(rho, R, h.peak);
    const double ring = 2 * pi * rho * (R / N);
    vol += z * ring;
    en += 0.5 * rho_w * g * z * z * ring;
  }
  r.volume_quadrature = vol;
  r.energy_quadrature = en;
  r.energy_mt = r.energy_analytic / kMegatonJ;
  return r;
}

HumpReport place_impact_hump(GlobalState &s, const SweDomain &d, const ImpactHump &h, double rho_w) {
  HumpReport r = hump_profile_report(h, d.grid.k.g, rho_w);
  if (h.peak == 0 || h.area == 0) return r;
  const double lat_c = h.lat_deg * kDeg, lon_c = h.lon_deg * kDeg;
  const double a = d.grid.k.radius;
  const auto &g = d.grid;
  // centre cell
  const long ci = std::lround((lat_c - g.lat0) / g.dlat), cj = std::lround((lon_c - g.lon0) / g.dlon);
  if (ci < 0 || ci >= d.gy) throw RangeError("hump centre latitude lies outside the grid");
  if (d.land[d.index(static_cast<int>(ci), static_cast<int>(wrap(cj, d.gx)))])
    throw ConfigError("hump centre (" + std::to_string(h.lat_deg) + ", " + std::to_string(h.lon_deg) +
                      ") is on land");
  const int S = std::max(1, h.subsamples);
  double vol = 0;
  for (int i = 0; i < d.gy; ++i) {
    const double lat = g.lat_of_row(i);
    if (a * std::abs(lat - lat_c) > r.radius + a * g.dlat) continue;
    const double area = a * a * std::cos(lat) * g.dlat * g.dlon;
    for (int j = 0; j < d.gx; ++j) {
      const std::size_t q = d.index(i, j);
      if (d.land[q]) continue;
      const double lon = g.lon_of_col(j);
      if (a * arc(lat, lon, lat_c, lon_c) > r.radius + 2 * a * std::max(g.dlat, g.dlon)) continue;
      double sum = 0;
      for (int p = 0; p < S; ++p)
        for (int t = 0; t < S; ++t) {
          const double sl = lat + ((p + 0.5) / S - 0.5) * g.dlat;
          const double sn = lon + ((t + 0.5) / S - 0.5) * g.dlon;
          sum += profile(a * arc(sl, sn, lat_c, lon_c), r.radius, h.peak);
        }
      const double z = sum / (S * S);
      s.at(swe::H, i, j) = static_cast<float>(s.at(swe::H, i, j) + z);
      vol += z * area;
    }
  }
  r.volume_grid = vol;
  return r;
}

}  // namespace dtrans
