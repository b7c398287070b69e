#pragma once

// Per-point updates, templated on the scalar so the identical expression
// tree can be evaluated on CountingScalar to obtain exact FLOP counts.

#include <cstddef>

namespace dtrans::detail {

struct CountingScalar {
  float v = 0.0f;
  static inline long ops = 0;

  CountingScalar() = default;
  CountingScalar(float x) : v(x) {}  // NOLINT: implicit by design of the counter

  friend CountingScalar operator+(CountingScalar a, CountingScalar b) { ++ops; return {a.v + b.v}; }
  friend CountingScalar operator-(CountingScalar a, CountingScalar b) { ++ops; return {a.v - b.v}; }
  friend CountingScalar operator*(CountingScalar a, CountingScalar b) { ++ops; return {a.v * b.v}; }
  friend CountingScalar operator/(CountingScalar a, CountingScalar b) { ++ops; return {a.v / b.v}; }
  CountingScalar &operator+=(CountingScalar b) { ++ops; v += b.v; return *this; }
};

// y = a0*x0; y += a1*x1; ... in coefficient order.
template <class T>
T linear_point(const T *a, const T *x, int count) {
  T y = a[0] * x[0];
  for (int k = 1; k < count; ++k) y += a[k] * x[k];
  return y;
}

// Constants folded once per program.
template <class T>
struct SweCoefs {
  T half_dt, dt, inv_a, g, two_omega, inv_2dlon, inv_2dlat, quarter;
};

template <class T>
struct Corner {
  T u, v, h, b, cosp;
  bool land;
};

template <class T>
struct CentreState {
  T u, v, h;
};

// Cell corners ordered SW, SE, NW, NE. x1 - x0 and x3 - x2 are differences
// along longitude, x2 - x0 and x3 - x1 along latitude.
template <class T>
T d_lon(T x0, T x1, T x2, T x3, T inv_2d) { return ((x1 - x0) + (x3 - x2)) * inv_2d; }
template <class T>
T d_lat(T x0, T x1, T x2, T x3, T inv_2d) { return ((x2 - x0) + (x3 - x1)) * inv_2d; }
template <class T>
T avg4(T x0, T x1, T x2, T x3, T quarter) { return quarter * ((x0 + x1) + (x2 + x3)); }

// Predictor to the cell centre at t + dt/2.
template <class T>
CentreState<T> swe_predict(const Corner<T> (&c)[4], T sinc, T secc, const SweCoefs<T> &k) {
  const bool coastal = c[0].land || c[1].land || c[2].land || c[3].land;

  // Land corners take the height of a water neighbour in the same cell so
  // the pressure gradient across the coastline vanishes.
  T he[4] = {c[0].h, c[1].h, c[2].h, c[3].h};
  if (coastal) {
    static constexpr int order[4][3] = {{1, 2, 3}, {0, 3, 2}, {3, 0, 1}, {2, 1, 0}};
    for (int q = 0; q < 4; ++q) {
      if (!c[q].land) continue;
      for (int alt : order[q])
        if (!c[alt].land) { he[q] = c[alt].h; break; }
    }
  }

  T f[4], gf[4];
  for (int q = 0; q < 4; ++q) {
    if (c[q].land) {
      f[q] = T(0.0f);
      gf[q] = T(0.0f);
    } else {
      const T s = c[q].h - c[q].b;
      f[q] = s * c[q].u;
      gf[q] = s * c[q].v * c[q].cosp;
    }
  }

  const T m = secc * k.inv_a;
  const T hav = avg4(he[0], he[1], he[2], he[3], k.quarter);
  const T div = d_lon(f[0], f[1], f[2], f[3], k.inv_2dlon) + d_lat(gf[0], gf[1], gf[2], gf[3], k.inv_2dlat);
  CentreState<T> out;
  out.h = hav - k.half_dt * m * div;
  if (coastal) {
    out.u = T(0.0f);
    out.v = T(0.0f);
    return out;
  }

  const T uc = avg4(c[0].u, c[1].u, c[2].u, c[3].u, k.quarter);
  const T vc = avg4(c[0].v, c[1].v, c[2].v, c[3].v, k.quarter);
  const T cor = k.two_omega * sinc + uc * sinc * secc * k.inv_a;
  const T um = uc * m, vm = vc * k.inv_a;

  const T du_lon = d_lon(c[0].u, c[1].u, c[2].u, c[3].u, k.inv_2dlon);
  const T du_lat = d_lat(c[0].u, c[1].u, c[2].u, c[3].u, k.inv_2dlat);
  const T dv_lon = d_lon(c[0].v, c[1].v, c[2].v, c[3].v, k.inv_2dlon);
  const T dv_lat = d_lat(c[0].v, c[1].v, c[2].v, c[3].v, k.inv_2dlat);
  const T dh_lon = d_lon(he[0], he[1], he[2], he[3], k.inv_2dlon);
  const T dh_lat = d_lat(he[0], he[1], he[2], he[3], k.inv_2dlat);

  out.u = uc - k.half_dt * (um * du_lon + vm * du_lat - cor * vc + k.g * m * dh_lon);
  out.v = vc - k.half_dt * (um * dv_lon + vm * dv_lat + cor * uc + k.g * k.inv_a * dh_lat);
  return out;
}

template <class T>
struct Centre {
  T u, v, h, b, cosc;
};

template <class T>
struct PointState {
  T u, v, h;
};

// Corrector at a grid point from the four surrounding half-step centres
// (SW, SE, NW, NE). Land points are returned unchanged.
template <class T>
PointState<T> swe_correct(const PointState<T> &p, bool land, const Centre<T> (&c)[4], T sinp, T secp,
                          const SweCoefs<T> &k) {
  if (land) return p;

  T f[4], gf[4];
  for (int q = 0; q < 4; ++q) {
    const T s = c[q].h - c[q].b;
    f[q] = s * c[q].u;
    gf[q] = s * c[q].v * c[q].cosc;
  }

  const T m = secp * k.inv_a;
  const T um = avg4(c[0].u, c[1].u, c[2].u, c[3].u, k.quarter);
  const T vm = avg4(c[0].v, c[1].v, c[2].v, c[3].v, k.quarter);
  const T cor = k.two_omega * sinp + um * sinp * secp * k.inv_a;
  const T umm = um * m, vmm = vm * k.inv_a;

  const T du_lon = d_lon(c[0].u, c[1].u, c[2].u, c[3].u, k.inv_2dlon);
  const T du_lat = d_lat(c[0].u, c[1].u, c[2].u, c[3].u, k.inv_2dlat);
  const T dv_lon = d_lon(c[0].v, c[1].v, c[2].v, c[3].v, k.inv_2dlon);
  const T dv_lat = d_lat(c[0].v, c[1].v, c[2].v, c[3].v, k.inv_2dlat);
  const T dh_lon = d_lon(c[0].h, c[1].h, c[2].h, c[3].h, k.inv_2dlon);
  const T dh_lat = d_lat(c[0].h, c[1].h, c[2].h, c[3].h, k.inv_2dlat);
  const T div = d_lon(f[0], f[1], f[2], f[3], k.inv_2dlon) + d_lat(gf[0], gf[1], gf[2], gf[3], k.inv_2dlat);

  PointState<T> out;
  out.u = p.u - k.dt * (umm * du_lon + vmm * du_lat - cor * vm + k.g * m * dh_lon);
  out.v = p.v - k.dt * (umm * dv_lon + vmm * dv_lat + cor * um + k.g * k.inv_a * dh_lat);
  out.h = p.h - k.dt * m * div;
  return out;
}

}  // namespace dtrans::detail
