#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dtrans/error.hpp"

namespace dtrans {

using Scalar = float;

// Stencil reach and the width of the communication layer that goes with it.
struct StencilSpec {
  int radius = 1;
  int fields_exchanged = 1;

  int halo_width() const { return 2 * radius; }
  void validate() const;
};

// Half-open rectangle of local indices, rows [r0, r1) x cols [c0, c1).
struct Rect {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  int rows() const { return r1 - r0; }
  int cols() const { return c1 - c0; }
  std::size_t size() const { return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols()); }
};

// An n x n interior plus a width-w communication layer, stored as one
// contiguous (n+w) x (n+w) row-major array. Row index i runs along y
// (latitude for SWE), column index j along x.
//
// In the translation layout the interior sits at [w, n+w) in both axes and
// the received layer at [0, w). Fixed-partition methods centre the interior
// at [w/2, n + w/2) instead; the storage is identical.
class HaloField {
 public:
  HaloField() = default;
  HaloField(int n, int w, Scalar fill = 0.0f);

  int n() const { return n_; }
  int w() const { return w_; }
  int extent() const { return n_ + w_; }

  Scalar &at(int i, int j) { return data_[index(i, j)]; }
  Scalar at(int i, int j) const { return data_[index(i, j)]; }

  Scalar *row(int i) { return data_.data() + static_cast<std::size_t>(i) * extent(); }
  const Scalar *row(int i) const { return data_.data() + static_cast<std::size_t>(i) * extent(); }

  std::span<Scalar> values() { return data_; }
  std::span<const Scalar> values() const { return data_; }

  void fill(Scalar v);
  void fill(const Rect &r, Scalar v);

  // Copies the rectangle out in row-major order.
  std::vector<Scalar> pack(const Rect &r) const;
  void unpack(const Rect &r, std::span<const Scalar> src);

  bool operator==(const HaloField &o) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(extent()) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  int w_ = 0;
  std::vector<Scalar> data_;
};

struct WorkerCoord {
  int x = 0;  // column of the worker grid
  int y = 0;  // row of the worker grid
  bool operator==(const WorkerCoord &) const = default;
};

enum class Neighbor { Left, Right, Up, Down };

// Workers on a 2D torus, each holding n x n points.
struct TorusGeometry {
  int workers_x = 1;
  int workers_y = 1;
  int n = 1;

  int worker_count() const { return workers_x * workers_y; }
  int global_x() const { return workers_x * n; }
  int global_y() const { return workers_y * n; }

  int id(WorkerCoord c) const { return c.y * workers_x + c.x; }
  WorkerCoord coord(int id) const { return {id % workers_x, id / workers_x}; }
  int neighbor(int id, Neighbor dir) const;

  void validate(const StencilSpec &stencil) const;
};

// Global coordinate offset of the worker-grid origin. Advanced by (r, r)
// per iteration and reduced modulo the global extent.
struct TranslationOffset {
  long ox = 0;
  long oy = 0;

  void advance(int r, const TorusGeometry &g);
  bool operator==(const TranslationOffset &) const = default;
};

struct GlobalPoint {
  long gi = 0;  // row
  long gj = 0;  // column
  bool operator==(const GlobalPoint &) const = default;
};

long wrap(long v, long period);

// Torus coordinates of the point held at local interior cell (local_i,
// local_j) of a worker in the translation layout. Grid data moves toward
// higher local indices as the mapping translates, so the point held at a
// fixed cell recedes by the offset.
GlobalPoint global_coord(const TorusGeometry &g, int worker_id, int local_i, int local_j,
                         const TranslationOffset &offset, int halo_width);

// Identity stencil in the translation read frame: out(i+w, j+w) = in(i+r, j+r)
// for every interior (i, j). The received layer of the result is left as-is.
HaloField shift_local(const HaloField &field, int r);

// Regions exchanged by the translation pipeline.
namespace region {
// Right edge sent downstream: rows [w, n+w) x cols [n, n+w).
Rect send_right(int n, int w);
// Top edge: rows [n, n+w) x cols [w, n+w).
Rect send_up(int n, int w);
// Left layer: rows [w, n+w) x cols [0, w).
Rect recv_left(int n, int w);
// Bottom layer: rows [0, w) x cols [w, n+w).
Rect recv_down(int n, int w);
// Corner received from the left, forwarded up: rows [n, n+w) x cols [0, w).
Rect forward_corner(int n, int w);
// Corner arriving from below: rows [0, w) x cols [0, w).
Rect recv_corner(int w);
}  // namespace region

}  // namespace dtrans
