#include "dtrans/grid.hpp"

#include <algorithm>
#include <string>

namespace dtrans {

void StencilSpec::validate() const {
  if (radius < 1) throw ConfigError("stencil radius must be >= 1, got " + std::to_string(radius));
  if (fields_exchanged < 1) throw ConfigError("at least one field must be exchanged");
}

HaloField::HaloField(int n, int w, Scalar fill)
    : n_(n), w_(w), data_(static_cast<std::size_t>(n + w) * static_cast<std::size_t>(n + w), fill) {
  if (n < 1 || w < 0) throw RangeError("invalid halo field shape n=" + std::to_string(n) + " w=" + std::to_string(w));
}

void HaloField::fill(Scalar v) { std::fill(data_.begin(), data_.end(), v); }

void HaloField::fill(const Rect &r, Scalar v) {
  for (int i = r.r0; i < r.r1; ++i) std::fill(row(i) + r.c0, row(i) + r.c1, v);
}

std::vector<Scalar> HaloField::pack(const Rect &r) const {
  std::vector<Scalar> out;
  out.reserve(r.size());
  for (int i = r.r0; i < r.r1; ++i) out.insert(out.end(), row(i) + r.c0, row(i) + r.c1);
  return out;
}

void HaloField::unpack(const Rect &r, std::span<const Scalar> src) {
  if (src.size() != r.size()) throw RangeError("package size does not match target region");
  auto it = src.begin();
  for (int i = r.r0; i < r.r1; ++i) {
    std::copy_n(it, r.cols(), row(i) + r.c0);
    it += r.cols();
  }
}

int TorusGeometry::neighbor(int id, Neighbor dir) const {
  WorkerCoord c = coord(id);
  switch (dir) {
    case Neighbor::Left: c.x = (c.x + workers_x - 1) % workers_x; break;
    case Neighbor::Right: c.x = (c.x + 1) % workers_x; break;
    case Neighbor::Down: c.y = (c.y + workers_y - 1) % workers_y; break;
    case Neighbor::Up: c.y = (c.y + 1) % workers_y; break;
  }
  return this->id(c);
}

void TorusGeometry::validate(const StencilSpec &stencil) const {
  stencil.validate();
  if (workers_x < 1 || workers_y < 1) throw ConfigError("worker grid must be at least 1x1");
  if (n < stencil.halo_width())
    throw ConfigError("n=" + std::to_string(n) + " is smaller than the communication width 2r=" +
                      std::to_string(stencil.halo_width()));
}

long wrap(long v, long period) {
  long m = v % period;
  return m < 0 ? m + period : m;
}

void TranslationOffset::advance(int r, const TorusGeometry &g) {
  ox = wrap(ox + r, g.global_x());
  oy = wrap(oy + r, g.global_y());
}

GlobalPoint global_coord(const TorusGeometry &g, int worker_id, int local_i, int local_j,
                         const TranslationOffset &offset, int halo_width) {
  const int lo = halo_width, hi = g.n + halo_width;
  if (local_i < lo || local_i >= hi || local_j < lo || local_j >= hi)
    throw RangeError("local index (" + std::to_string(local_i) + ", " + std::to_string(local_j) +
                     ") outside interior [" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  if (worker_id < 0 || worker_id >= g.worker_count()) throw RangeError("worker id out of range");
  const WorkerCoord c = g.coord(worker_id);
  return {wrap(static_cast<long>(c.y) * g.n + (local_i - lo) - offset.oy, g.global_y()),
          wrap(static_cast<long>(c.x) * g.n + (local_j - lo) - offset.ox, g.global_x())};
}

HaloField shift_local(const HaloField &field, int r) {
  const int n = field.n(), w = field.w();
  if (w != 2 * r) throw RangeError("shift_local expects halo width 2r");
  HaloField out = field;
  for (int i = 0; i < n; ++i) {
    const Scalar *src = field.row(i + r) + r;
    std::copy_n(src, n, out.row(i + w) + w);
  }
  return out;
}

namespace region {
Rect send_right(int n, int w) { return {w, n + w, n, n + w}; }
Rect send_up(int n, int w) { return {n, n + w, w, n + w}; }
Rect recv_left(int n, int w) { return {w, n + w, 0, w}; }
Rect recv_down(int n, int w) { return {0, w, w, n + w}; }
Rect forward_corner(int n, int w) { return {n, n + w, 0, w}; }
Rect recv_corner(int w) { return {0, w, 0, w}; }
}  // namespace region

}  // namespace dtrans
