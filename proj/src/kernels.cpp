#include "dtrans/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "point_ops.hpp"

namespace dtrans {

using detail::CountingScalar;

// ---------------------------------------------------------------------------
// Linear stencils

namespace {

// Offsets (di, dj) = (row, column) in coefficient order W, S, E, N, C, SW, SE, NW, NE.
constexpr int kOffsets[9][2] = {{0, -1}, {-1, 0}, {0, 1}, {1, 0}, {0, 0}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};

int point_count(LinearShape s) { return s == LinearShape::FivePoint ? 5 : 9; }

}  // namespace

LinearStencilKernel LinearStencilKernel::heat5(Scalar alpha) {
  return {LinearShape::FivePoint, {alpha, alpha, alpha, alpha, 1.0f - 4.0f * alpha}};
}

LinearStencilKernel LinearStencilKernel::heat9(Scalar alpha_edge, Scalar alpha_diag) {
  const Scalar c = 1.0f - 4.0f * alpha_edge - 4.0f * alpha_diag;
  return {LinearShape::NinePoint,
          {alpha_edge, alpha_edge, alpha_edge, alpha_edge, c, alpha_diag, alpha_diag, alpha_diag, alpha_diag}};
}

void LinearStencilKernel::validate() const {
  if (static_cast<int>(coeffs.size()) != point_count(shape))
    throw ConfigError("linear stencil expects " + std::to_string(point_count(shape)) + " coefficients, got " +
                      std::to_string(coeffs.size()));
  for (Scalar a : coeffs)
    if (!std::isfinite(a)) throw ConfigError("non-finite stencil coefficient");
}

void apply_linear(const HaloField &in, HaloField &out, const LinearStencilKernel &k, const Rect &region,
                  int shift) {
  const int count = point_count(k.shape);
  const Scalar *a = k.coeffs.data();
  Scalar x[9];
  for (int i = region.r0; i < region.r1; ++i) {
    for (int j = region.c0; j < region.c1; ++j) {
      for (int q = 0; q < count; ++q) x[q] = in.at(i - shift + kOffsets[q][0], j - shift + kOffsets[q][1]);
      out.at(i, j) = detail::linear_point(a, x, count);
    }
  }
}

HaloField apply_linear(const HaloField &field, const LinearStencilKernel &k) {
  const int w = field.w(), n = field.n();
  if (w != 2 * k.radius()) throw RangeError("apply_linear expects halo width 2r");
  HaloField out = field;
  apply_linear(field, out, k, {w, n + w, w, n + w}, k.radius());
  return out;
}

long count_linear_flops(const LinearStencilKernel &k) {
  const int count = point_count(k.shape);
  CountingScalar a[9], x[9];
  for (int q = 0; q < count; ++q) {
    a[q] = CountingScalar(k.coeffs.at(q));
    x[q] = CountingScalar(1.0f);
  }
  CountingScalar::ops = 0;
  (void)detail::linear_point(a, x, count);
  return CountingScalar::ops;
}

LinearProgram::LinearProgram(LinearStencilKernel k) : kernel_(std::move(k)) { kernel_.validate(); }

std::string LinearProgram::name() const {
  return kernel_.shape == LinearShape::FivePoint ? "heat5" : "heat9";
}

void LinearProgram::compute(FieldSet &fields, int, const Rect &out, Frame frame) const {
  HaloField &x = fields.at(0);
  HaloField y = x;
  apply_linear(x, y, kernel_, out, frame == Frame::Translating ? kernel_.radius() : 0);
  for (int i = out.r0; i < out.r1; ++i) std::copy(y.row(i) + out.c0, y.row(i) + out.c1, x.row(i) + out.c0);
}

Rect LinearProgram::shrink(const Rect &v, int) const {
  const int r = kernel_.radius();
  return {v.r0 + r, v.r1 - r, v.c0 + r, v.c1 - r};
}

// ---------------------------------------------------------------------------
// Trigonometric tables

TrigRow trig_row(double lat) {
  const double c = std::cos(lat);
  return {static_cast<Scalar>(std::sin(lat)), static_cast<Scalar>(c), static_cast<Scalar>(1.0 / c)};
}

TrigTables build_trig_tables(const std::vector<double> &grid_latitudes, double dlat) {
  constexpr double pole_guard = (90.0 - 1e-3) * std::numbers::pi / 180.0;
  TrigTables t;
  t.grid.reserve(grid_latitudes.size());
  t.centre.reserve(grid_latitudes.size());
  for (double lat : grid_latitudes) {
    const double lc = lat - 0.5 * dlat;
    if (std::abs(lat) >= pole_guard || std::abs(lc) >= pole_guard)
      throw RangeError("latitude " + std::to_string(lat * 180.0 / std::numbers::pi) + " deg reaches a pole");
    t.grid.push_back(trig_row(lat));
    t.centre.push_back(trig_row(lc));
  }
  return t;
}

double swe_cfl(const SweGrid &grid, double max_depth, double max_abs_lat) {
  const double c = std::sqrt(grid.k.g * std::max(max_depth, 0.0));
  const double dx = grid.k.radius * std::cos(max_abs_lat) * grid.dlon;
  const double dy = grid.k.radius * grid.dlat;
  return c * grid.dt / std::min(dx, dy);
}

// ---------------------------------------------------------------------------
// Shallow water

namespace {

detail::SweCoefs<Scalar> make_coefs(const SweGrid &g) {
  return {static_cast<Scalar>(0.5 * g.dt),        static_cast<Scalar>(g.dt),
          static_cast<Scalar>(1.0 / g.k.radius),  static_cast<Scalar>(g.k.g),
          static_cast<Scalar>(2.0 * g.k.omega),   static_cast<Scalar>(0.5 / g.dlon),
          static_cast<Scalar>(0.5 / g.dlat),      0.25f};
}

template <class T>
detail::SweCoefs<T> cast_coefs(const detail::SweCoefs<Scalar> &c) {
  return {T(c.half_dt), T(c.dt), T(c.inv_a), T(c.g), T(c.two_omega), T(c.inv_2dlon), T(c.inv_2dlat), T(c.quarter)};
}

}  // namespace

SweProgram::SweProgram(SweGrid grid) : grid_(grid) {
  if (!(grid_.dt > 0) || !(grid_.dlat > 0) || !(grid_.dlon > 0)) throw ConfigError("SWE grid spacing and dt must be positive");
}

std::vector<std::string> SweProgram::field_names() const {
  return {"u", "v", "h", "uc", "vc", "hc", "b", "land", "sinp", "cosp", "secp", "bc", "sinc", "cosc", "secc"};
}

std::vector<int> SweProgram::exchanged(int substep, Frame frame) const {
  using namespace swe;
  if (substep == 1) return {UC, VC, HC};
  if (frame == Frame::Fixed) return {U, V, H};
  // Constants travel with their grid points when the mapping translates.
  return {U, V, H, B, LAND, SINP, COSP, SECP, BC, SINC, COSC, SECC};
}

Rect SweProgram::shrink(const Rect &v, int substep) const {
  if (substep == 0) return {v.r0 + 1, v.r1, v.c0 + 1, v.c1};
  return {v.r0, v.r1 - 1, v.c0, v.c1 - 1};
}

void SweProgram::compute(FieldSet &f, int substep, const Rect &out, Frame frame) const {
  if (static_cast<int>(f.size()) != swe::COUNT) throw RangeError("SWE field set has the wrong number of fields");
  if (substep == 0) {
    half_step_even(f, out);
    check_finite(f, {swe::UC, swe::VC, swe::HC}, out, "swe even half-step");
  } else {
    half_step_odd(f, out, frame == Frame::Translating ? 1 : 0);
    check_finite(f, {swe::U, swe::V, swe::H}, out, "swe odd half-step");
  }
}

void SweProgram::half_step_even(FieldSet &f, const Rect &out) const {
  using namespace swe;
  const auto k = make_coefs(grid_);
  for (int i = out.r0; i < out.r1; ++i) {
    for (int j = out.c0; j < out.c1; ++j) {
      detail::Corner<Scalar> c[4];
      const int ci[4] = {i - 1, i - 1, i, i};
      const int cj[4] = {j - 1, j, j - 1, j};
      for (int q = 0; q < 4; ++q) {
        c[q] = {f[U].at(ci[q], cj[q]), f[V].at(ci[q], cj[q]), f[H].at(ci[q], cj[q]), f[B].at(ci[q], cj[q]),
                f[COSP].at(ci[q], cj[q]), f[LAND].at(ci[q], cj[q]) != 0.0f};
      }
      const auto r = detail::swe_predict(c, f[SINC].at(i, j), f[SECC].at(i, j), k);
      f[UC].at(i, j) = r.u;
      f[VC].at(i, j) = r.v;
      f[HC].at(i, j) = r.h;
    }
  }
}

void SweProgram::half_step_odd(FieldSet &f, const Rect &out, int shift) const {
  using namespace swe;
  const auto k = make_coefs(grid_);
  std::array<HaloField, 3> res{HaloField(f[U].n(), f[U].w()), HaloField(f[U].n(), f[U].w()),
                               HaloField(f[U].n(), f[U].w())};

  for (int i = out.r0; i < out.r1; ++i) {
    for (int j = out.c0; j < out.c1; ++j) {
      const int pi = i - shift, pj = j - shift;
      detail::Centre<Scalar> c[4];
      const int ci[4] = {pi, pi, pi + 1, pi + 1};
      const int cj[4] = {pj, pj + 1, pj, pj + 1};
      for (int q = 0; q < 4; ++q) {
        c[q] = {f[UC].at(ci[q], cj[q]), f[VC].at(ci[q], cj[q]), f[HC].at(ci[q], cj[q]), f[BC].at(ci[q], cj[q]),
                f[COSC].at(ci[q], cj[q])};
      }
      const detail::PointState<Scalar> p{f[U].at(pi, pj), f[V].at(pi, pj), f[H].at(pi, pj)};
      const auto r = detail::swe_correct(p, f[LAND].at(pi, pj) != 0.0f, c, f[SINP].at(pi, pj), f[SECP].at(pi, pj), k);
      res[0].at(i, j) = r.u;
      res[1].at(i, j) = r.v;
      res[2].at(i, j) = r.h;
    }
  }

  // In the translating frame the constants move with their grid points:
  // new(i, j) = old(i-1, j-1). Descending order keeps the copy in place.
  if (shift != 0) {
    for (int fld : {B, LAND, SINP, COSP, SECP, BC, SINC, COSC, SECC}) {
      HaloField &x = f[fld];
      for (int i = out.r1 - 1; i >= out.r0; --i)
        for (int j = out.c1 - 1; j >= out.c0; --j) x.at(i, j) = x.at(i - shift, j - shift);
    }
  }
  for (int q = 0; q < 3; ++q) {
    HaloField &x = f[U + q];
    for (int i = out.r0; i < out.r1; ++i) std::copy(res[q].row(i) + out.c0, res[q].row(i) + out.c1, x.row(i) + out.c0);
  }
}

long SweProgram::flops_per_point(int substep) const {
  using T = CountingScalar;
  const auto k = cast_coefs<T>(make_coefs(grid_));
  CountingScalar::ops = 0;
  if (substep == 0) {
    detail::Corner<T> c[4];
    for (int q = 0; q < 4; ++q) c[q] = {T(0.1f), T(0.2f), T(10.0f), T(1.0f), T(0.9f), false};
    (void)detail::swe_predict(c, T(0.5f), T(1.1f), k);
  } else {
    detail::Centre<T> c[4];
    for (int q = 0; q < 4; ++q) c[q] = {T(0.1f), T(0.2f), T(10.0f), T(1.0f), T(0.9f)};
    (void)detail::swe_correct(detail::PointState<T>{T(0.1f), T(0.2f), T(10.0f)}, false, c, T(0.5f), T(1.1f), k);
  }
  return CountingScalar::ops;
}

void apply_land_mask(FieldSet &f) {
  using namespace swe;
  if (static_cast<int>(f.size()) != COUNT) throw RangeError("SWE field set has the wrong number of fields");
  auto land = f[LAND].values();
  auto u = f[U].values(), v = f[V].values(), h = f[H].values();
  auto b = f[B].values();
  for (std::size_t q = 0; q < land.size(); ++q) {
    if (land[q] == 0.0f) continue;
    u[q] = 0.0f;
    v[q] = 0.0f;
    h[q] = b[q];
  }
}

void check_finite(const FieldSet &fields, const std::vector<int> &which, const Rect &region, const char *where) {
  for (int fld : which) {
    const HaloField &x = fields.at(fld);
    for (int i = region.r0; i < region.r1; ++i)
      for (int j = region.c0; j < region.c1; ++j)
        if (!std::isfinite(x.at(i, j)))
          throw InstabilityError(std::string(where) + ": non-finite value in field " + std::to_string(fld) + " at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + "); check the CFL number");
  }
}

void fill_periodic_halo(HaloField &f, int lo) {
  const int n = f.n(), e = f.extent();
  auto src = [&](int k) { return lo + static_cast<int>(wrap(k - lo, n)); };
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      const bool interior = i >= lo && i < lo + n && j >= lo && j < lo + n;
      if (!interior) f.at(i, j) = f.at(src(i), src(j));
    }
}

}  // namespace dtrans
