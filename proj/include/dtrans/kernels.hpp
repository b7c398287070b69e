#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dtrans/grid.hpp"

namespace dtrans {

// Where a worker's interior sits and how a kernel's read frame relates to
// its write frame.
//   Translating: interior [w, n+w), outputs read a neighbourhood displaced
//                by (-r, -r), so the mapping advances every step.
//   Fixed:       interior centred in the array, outputs read their own
//                neighbourhood (static and ghost decompositions).
enum class Frame { Translating, Fixed };

using FieldSet = std::vector<HaloField>;

// A stencil computation as seen by the engine: a fixed list of fields, a
// number of sub-steps per time step, and which fields must be fresh in the
// halo before each sub-step.
class StencilProgram {
 public:
  virtual ~StencilProgram() = default;

  virtual std::string name() const = 0;
  virtual int radius() const = 0;
  virtual int substeps() const { return 1; }
  virtual int field_count() const = 0;
  virtual std::vector<std::string> field_names() const = 0;

  // Fields whose halos are read by `substep`. In the translating frame this
  // includes every field that must travel with its grid point.
  virtual std::vector<int> exchanged(int substep, Frame frame) const = 0;

  // Fields holding the prognostic state, in output order.
  virtual std::vector<int> state_fields() const = 0;

  // Computes `substep` for every output cell in `out`. Translating frame:
  // out is [w, n+w)^2 and the whole array is read. Fixed frame: cells
  // outside the valid input region must not be part of `out`.
  virtual void compute(FieldSet &fields, int substep, const Rect &out, Frame frame) const = 0;

  // Valid output region of `substep` given the valid input region (fixed
  // frame, used by the ghost method).
  virtual Rect shrink(const Rect &valid, int substep) const = 0;

  // Arithmetic operations per interior point for one sub-step, obtained by
  // running the point update on an instrumented scalar type.
  virtual long flops_per_point(int substep) const = 0;
};

// ---------------------------------------------------------------------------
// Linear stencils with forward-Euler time integration.

enum class LinearShape { FivePoint, NinePoint };

// Coefficients ordered W, S, E, N, C and, for the 9-point shape, SW, SE, NW, NE.
struct LinearStencilKernel {
  LinearShape shape = LinearShape::FivePoint;
  std::vector<Scalar> coeffs;

  static LinearStencilKernel heat5(Scalar alpha);
  static LinearStencilKernel heat9(Scalar alpha_edge, Scalar alpha_diag);

  int radius() const { return 1; }
  // Table value used by the cost model; the instrumented count must agree.
  int flops_per_point() const { return shape == LinearShape::FivePoint ? 9 : 17; }
  void validate() const;
};

// out(i, j) for every (i, j) in `out`, reading the neighbourhood centred at
// (i - shift, j - shift). Accumulation order follows the coefficient order.
void apply_linear(const HaloField &in, HaloField &out, const LinearStencilKernel &k, const Rect &region,
                  int shift);

// One translating step in place: out(i+w, j+w) from the read frame (i+r, j+r).
HaloField apply_linear(const HaloField &field, const LinearStencilKernel &k);

long count_linear_flops(const LinearStencilKernel &k);

class LinearProgram final : public StencilProgram {
 public:
  explicit LinearProgram(LinearStencilKernel k);

  std::string name() const override;
  int radius() const override { return 1; }
  int field_count() const override { return 1; }
  std::vector<std::string> field_names() const override { return {"x"}; }
  std::vector<int> exchanged(int, Frame) const override { return {0}; }
  std::vector<int> state_fields() const override { return {0}; }
  void compute(FieldSet &fields, int substep, const Rect &out, Frame frame) const override;
  Rect shrink(const Rect &valid, int substep) const override;
  long flops_per_point(int) const override { return count_linear_flops(kernel_); }

  const LinearStencilKernel &kernel() const { return kernel_; }

 private:
  LinearStencilKernel kernel_;
};

// ---------------------------------------------------------------------------
// Shallow water on a latitude-longitude grid.

struct SweConstants {
  double g = 9.80665;        // m/s^2
  double radius = 6.371e6;   // m
  double omega = 7.2921e-5;  // 1/s
};

// Uniform lat-lon spacing. Row gi sits at lat0 + gi*dlat, column gj at
// lon0 + gj*dlon (radians). Cell centre c sits half a spacing below c.
struct SweGrid {
  double lat0 = 0.0;
  double lon0 = 0.0;
  double dlat = 0.0;
  double dlon = 0.0;
  double dt = 1.0;
  SweConstants k;

  double lat_of_row(double gi) const { return lat0 + gi * dlat; }
  double lon_of_col(double gj) const { return lon0 + gj * dlon; }
};

struct TrigRow {
  Scalar sin = 0, cos = 0, sec = 0;
};

struct TrigTables {
  std::vector<TrigRow> grid;    // per grid row
  std::vector<TrigRow> centre;  // per cell-centre row, half a row below
};

// Latitudes in radians. Throws RangeError if any latitude reaches a pole
// (|lat| >= 89.999 degrees) where sec overflows.
TrigTables build_trig_tables(const std::vector<double> &grid_latitudes, double dlat);
TrigRow trig_row(double lat);

// Field layout of the SWE program.
namespace swe {
enum Field : int {
  U = 0, V, H,            // prognostic, grid points
  UC, VC, HC,             // half-step intermediates, cell centres
  B, LAND, SINP, COSP, SECP,  // grid-point constants
  BC, SINC, COSC, SECC,       // cell-centre constants
  COUNT
};
}

class SweProgram final : public StencilProgram {
 public:
  explicit SweProgram(SweGrid grid);

  std::string name() const override { return "swe"; }
  int radius() const override { return 1; }
  int substeps() const override { return 2; }
  int field_count() const override { return swe::COUNT; }
  std::vector<std::string> field_names() const override;
  std::vector<int> exchanged(int substep, Frame frame) const override;
  std::vector<int> state_fields() const override { return {swe::U, swe::V, swe::H}; }
  void compute(FieldSet &fields, int substep, const Rect &out, Frame frame) const override;
  Rect shrink(const Rect &valid, int substep) const override;
  long flops_per_point(int substep) const override;

  const SweGrid &grid() const { return grid_; }

 private:
  void half_step_even(FieldSet &f, const Rect &out) const;
  void half_step_odd(FieldSet &f, const Rect &out, int shift) const;

  SweGrid grid_;
};

// Reference targets for the SWE sub-steps (even, odd, full step).
struct KernelCostSheet {
  int even_flops = 94, odd_flops = 61, full_flops = 155;
  int even_fields = 4, odd_fields = 3, full_fields = 7;
};

// u = v = 0 and h = b (zero depth) wherever the land flag is set.
void apply_land_mask(FieldSet &fields);

// Throws InstabilityError naming the field if any value in `region` is not finite.
void check_finite(const FieldSet &fields, const std::vector<int> &which, const Rect &region, const char *where);

// Copies the interior periodically into every halo cell of a single worker
// whose interior begins at `lo` (w for translating, w/2 for fixed).
void fill_periodic_halo(HaloField &f, int lo);

// Gravity-wave CFL number sqrt(g*s_max) * dt / min spacing.
double swe_cfl(const SweGrid &grid, double max_depth, double max_abs_lat);

}  // namespace dtrans
