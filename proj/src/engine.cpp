#include "dtrans/engine.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <set>

#include "timing.hpp"

namespace dtrans {

void MethodConfig::validate(int n, int r) const {
  if (method == Method::Ghost) {
    if (ghost_steps < 1) throw ConfigError("ghost method needs steps-between-exchanges >= 1");
    if (ghost_width(r) > n)
      throw ConfigError("ghost width " + std::to_string(ghost_width(r)) + " exceeds subdomain n=" + std::to_string(n));
  }
}

std::string MethodConfig::name() const {
  switch (method) {
    case Method::Translation: return "translation";
    case Method::Static: return "static";
    case Method::Ghost: return "ghost";
  }
  return "?";
}

MethodConfig MethodConfig::parse(const std::string &s, int ghost_steps) {
  if (s == "translation") return {Method::Translation, 1};
  if (s == "static") return {Method::Static, 1};
  if (s == "ghost") return {Method::Ghost, ghost_steps};
  throw ConfigError("unknown method '" + s + "' (translation, static, ghost)");
}

GlobalState::GlobalState(int gx_, int gy_, int field_count, Scalar fill) : gx(gx_), gy(gy_) {
  fields.assign(static_cast<std::size_t>(field_count),
                std::vector<Scalar>(static_cast<std::size_t>(gx_) * static_cast<std::size_t>(gy_), fill));
}

long count_differences(const GlobalState &a, const GlobalState &b, const std::vector<int> &fields) {
  if (a.gx != b.gx || a.gy != b.gy) throw RangeError("count_differences: shapes differ");
  long d = 0;
  for (int f : fields) {
    const auto &x = a.fields.at(static_cast<std::size_t>(f));
    const auto &y = b.fields.at(static_cast<std::size_t>(f));
    for (std::size_t q = 0; q < x.size(); ++q)
      if (std::bit_cast<std::uint32_t>(x[q]) != std::bit_cast<std::uint32_t>(y[q])) ++d;
  }
  return d;
}

namespace {

std::vector<int> exchanged_union(const StencilProgram &p, Frame frame) {
  std::set<int> s;
  for (int k = 0; k < p.substeps(); ++k)
    for (int f : p.exchanged(k, frame)) s.insert(f);
  return {s.begin(), s.end()};
}

// Worker-local arrays. lo is where the interior starts.
struct Worker {
  FieldSet fields;
  WorkerCoord coord;
};

class Numerics {
 public:
  Numerics(const StencilProgram &p, const RunConfig &cfg)
      : p_(p), cfg_(cfg), g_(cfg.geom), r_(p.radius()), net_(cfg.geom, LinkModel{}) {
    switch (cfg.method.method) {
      case Method::Translation:
        w_ = 2 * r_;
        lo_ = w_;
        frame_ = Frame::Translating;
        break;
      case Method::Static:
        w_ = 2 * r_;
        lo_ = r_;
        frame_ = Frame::Fixed;
        break;
      case Method::Ghost:
        w_ = 2 * cfg.method.ghost_width(r_);
        lo_ = w_ / 2;
        frame_ = Frame::Fixed;
        break;
    }
  }

  void scatter(const GlobalState &init) {
    workers_.resize(static_cast<std::size_t>(g_.worker_count()));
    for (int id = 0; id < g_.worker_count(); ++id) {
      Worker &wk = workers_[static_cast<std::size_t>(id)];
      wk.coord = g_.coord(id);
      wk.fields.assign(static_cast<std::size_t>(p_.field_count()), HaloField(g_.n, w_));
      for (int f = 0; f < p_.field_count(); ++f) {
        HaloField &x = wk.fields[static_cast<std::size_t>(f)];
        for (int i = 0; i < x.extent(); ++i) {
          const long gi = wrap(static_cast<long>(wk.coord.y) * g_.n + i - lo_, g_.global_y());
          for (int j = 0; j < x.extent(); ++j) {
            const long gj = wrap(static_cast<long>(wk.coord.x) * g_.n + j - lo_, g_.global_x());
            x.at(i, j) = init.at(f, gi, gj);
          }
        }
      }
    }
  }

  GlobalState gather() const {
    GlobalState out(g_.global_x(), g_.global_y(), p_.field_count());
    for (int id = 0; id < g_.worker_count(); ++id) {
      const Worker &wk = workers_[static_cast<std::size_t>(id)];
      for (int i = lo_; i < lo_ + g_.n; ++i) {
        for (int j = lo_; j < lo_ + g_.n; ++j) {
          GlobalPoint gp;
          if (frame_ == Frame::Translating) {
            gp = global_coord(g_, id, i, j, offset_, w_);
          } else {
            gp = {static_cast<long>(wk.coord.y) * g_.n + i - lo_, static_cast<long>(wk.coord.x) * g_.n + j - lo_};
          }
          for (int f = 0; f < p_.field_count(); ++f)
            out.at(f, gp.gi, gp.gj) = wk.fields[static_cast<std::size_t>(f)].at(i, j);
        }
      }
    }
    return out;
  }

  void step(long k) {
    switch (cfg_.method.method) {
      case Method::Translation:
        for (int s = 0; s < p_.substeps(); ++s) translation_substep(s);
        offset_.advance(r_, g_);
        break;
      case Method::Static:
        for (int s = 0; s < p_.substeps(); ++s) {
          fixed_exchange(p_.exchanged(s, frame_), r_);
          const Rect in{lo_, lo_ + g_.n, lo_, lo_ + g_.n};
          for (auto &wk : workers_) p_.compute(wk.fields, s, in, frame_);
        }
        break;
      case Method::Ghost:
        ghost_step(k);
        break;
    }
    if (cfg_.poison_halos) poison();
  }

  const TranslationOffset &offset() const { return offset_; }
  Network &network() { return net_; }

 private:
  Package make(long it, int s, PackageKind kind, const Worker &wk, const std::vector<int> &flds, const Rect &r) {
    Package pk{it, s, kind, {}};
    pk.payload.reserve(flds.size() * r.size());
    for (int f : flds) {
      auto v = wk.fields[static_cast<std::size_t>(f)].pack(r);
      pk.payload.insert(pk.payload.end(), v.begin(), v.end());
    }
    return pk;
  }

  void post(int src, Dir d, Package pk) {
    Link &l = net_.out(src, d);
    l.send(pk.byte_size(), 0.0);
    l.push(std::move(pk));
  }

  void take(Worker &wk, Link &l, const std::vector<int> &flds, const Rect &r, PackageKind expect) {
    Package pk = l.pop();
    l.mark_delivered();
    if (pk.kind != expect || pk.payload.size() != flds.size() * r.size())
      throw DeadlockError(std::string("pipeline miswired: expected ") + to_string(expect) + " package, got " +
                          to_string(pk.kind) + " on link " + std::to_string(l.src()) + " -> " +
                          std::to_string(l.dst()));
    std::span<const Scalar> all(pk.payload);
    for (std::size_t q = 0; q < flds.size(); ++q)
      wk.fields[static_cast<std::size_t>(flds[q])].unpack(r, all.subspan(q * r.size(), r.size()));
  }

  void translation_substep(int s) {
    const int n = g_.n, w = w_;
    const auto flds = p_.exchanged(s, frame_);
    const int W = g_.worker_count();
    for (int id = 0; id < W; ++id) {
      const Worker &wk = workers_[static_cast<std::size_t>(id)];
      post(id, Dir::Right, make(iter_, s, PackageKind::Horizontal, wk, flds, region::send_right(n, w)));
      post(id, Dir::Up, make(iter_, s, PackageKind::Vertical, wk, flds, region::send_up(n, w)));
    }
    for (int id = 0; id < W; ++id) {
      Worker &wk = workers_[static_cast<std::size_t>(id)];
      take(wk, net_.in(id, Dir::Right), flds, region::recv_left(n, w), PackageKind::Horizontal);
      take(wk, net_.in(id, Dir::Up), flds, region::recv_down(n, w), PackageKind::Vertical);
    }
    // corner received from the left goes one hop further up
    for (int id = 0; id < W; ++id)
      post(id, Dir::Up, make(iter_, s, PackageKind::Corner, workers_[static_cast<std::size_t>(id)], flds,
                             region::forward_corner(n, w)));
    for (int id = 0; id < W; ++id)
      take(workers_[static_cast<std::size_t>(id)], net_.in(id, Dir::Up), flds, region::recv_corner(w),
           PackageKind::Corner);

    const Rect out{w, n + w, w, n + w};
    for (auto &wk : workers_) p_.compute(wk.fields, s, out, frame_);
    if (s + 1 == p_.substeps()) ++iter_;
  }

  // Bidirectional exchange of a band of width h around an interior at [lo, lo+n):
  // columns first, then full-width rows so the corners come along.
  void fixed_exchange(const std::vector<int> &flds, int h) {
    const int n = g_.n, lo = lo_;
    const int W = g_.worker_count();
    const Rect left_cols{lo, lo + n, lo, lo + h}, right_cols{lo, lo + n, lo + n - h, lo + n};
    const Rect left_halo{lo, lo + n, lo - h, lo}, right_halo{lo, lo + n, lo + n, lo + n + h};
    for (int id = 0; id < W; ++id) {
      const Worker &wk = workers_[static_cast<std::size_t>(id)];
      post(id, Dir::Left, make(iter_, 0, PackageKind::Halo, wk, flds, left_cols));
      post(id, Dir::Right, make(iter_, 0, PackageKind::Halo, wk, flds, right_cols));
    }
    for (int id = 0; id < W; ++id) {
      Worker &wk = workers_[static_cast<std::size_t>(id)];
      take(wk, net_.in(id, Dir::Right), flds, left_halo, PackageKind::Halo);
      take(wk, net_.in(id, Dir::Left), flds, right_halo, PackageKind::Halo);
    }
    const int c0 = lo - h, c1 = lo + n + h;
    const Rect bottom_rows{lo, lo + h, c0, c1}, top_rows{lo + n - h, lo + n, c0, c1};
    const Rect bottom_halo{lo - h, lo, c0, c1}, top_halo{lo + n, lo + n + h, c0, c1};
    for (int id = 0; id < W; ++id) {
      const Worker &wk = workers_[static_cast<std::size_t>(id)];
      post(id, Dir::Down, make(iter_, 0, PackageKind::Halo, wk, flds, bottom_rows));
      post(id, Dir::Up, make(iter_, 0, PackageKind::Halo, wk, flds, top_rows));
    }
    for (int id = 0; id < W; ++id) {
      Worker &wk = workers_[static_cast<std::size_t>(id)];
      take(wk, net_.in(id, Dir::Up), flds, bottom_halo, PackageKind::Halo);
      take(wk, net_.in(id, Dir::Down), flds, top_halo, PackageKind::Halo);
    }
  }

  void ghost_step(long k) {
    const int pg = cfg_.method.ghost_steps;
    if (k % pg == 0) {
      fixed_exchange(p_.exchanged(0, frame_), w_ / 2);
      valid_ = Rect{0, g_.n + w_, 0, g_.n + w_};
    }
    for (int s = 0; s < p_.substeps(); ++s) {
      const Rect out = p_.shrink(valid_, s);
      for (auto &wk : workers_) p_.compute(wk.fields, s, out, frame_);
      valid_ = out;
    }
    ++iter_;
  }

  // Everything outside the currently valid region is stale.
  void poison() {
    const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
    const int e = g_.n + w_;
    Rect v{lo_, lo_ + g_.n, lo_, lo_ + g_.n};
    if (cfg_.method.method == Method::Ghost) v = valid_;
    const auto flds = exchanged_union(p_, frame_);
    const Rect bands[4] = {{0, v.r0, 0, e}, {v.r1, e, 0, e}, {v.r0, v.r1, 0, v.c0}, {v.r0, v.r1, v.c1, e}};
    for (auto &wk : workers_)
      for (int f : flds)
        for (const Rect &b : bands)
          if (b.rows() > 0 && b.cols() > 0) wk.fields[static_cast<std::size_t>(f)].fill(b, nan);
  }

  const StencilProgram &p_;
  const RunConfig &cfg_;
  TorusGeometry g_;
  int r_;
  int w_ = 0, lo_ = 0;
  Frame frame_ = Frame::Translating;
  Network net_;
  std::vector<Worker> workers_;
  TranslationOffset offset_;
  long iter_ = 0;
  Rect valid_{};
};

}  // namespace

RunResult run(const StencilProgram &program, const GlobalState &init, const RunConfig &cfg) {
  const int r = program.radius();
  cfg.geom.validate(StencilSpec{r, static_cast<int>(program.exchanged(0, Frame::Translating).size())});
  cfg.method.validate(cfg.geom.n, r);
  if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
  if (init.gx != cfg.geom.global_x() || init.gy != cfg.geom.global_y() ||
      static_cast<int>(init.fields.size()) != program.field_count())
    throw ConfigError("initial state is " + std::to_string(init.gx) + "x" + std::to_string(init.gy) + " with " +
                      std::to_string(init.fields.size()) + " fields; geometry needs " +
                      std::to_string(cfg.geom.global_x()) + "x" + std::to_string(cfg.geom.global_y()) + " with " +
                      std::to_string(program.field_count()));

  RunResult res;
  if (cfg.numerics) {
    Numerics num(program, cfg);
    num.scatter(init);
    for (long k = 0; k < cfg.steps; ++k) {
      num.step(k);
      if (cfg.on_snapshot && cfg.snapshot_every > 0 && (k + 1) % cfg.snapshot_every == 0 && k + 1 < cfg.steps)
        cfg.on_snapshot(k + 1, num.gather());
    }
    res.final_state = num.gather();
    res.offset = num.offset();
    res.numerics_network = num.network();
    if (cfg.on_snapshot && cfg.snapshot_every > 0) cfg.on_snapshot(cfg.steps, res.final_state);
  } else {
    res.final_state = init;
  }

  if (cfg.timing.enabled) simulate_timing(program, cfg, res);
  return res;
}

GlobalState run_reference(const StencilProgram &program, const GlobalState &init, long steps) {
  const int r = program.radius();
  const int gx = init.gx, gy = init.gy;
  if (gx != gy) throw ConfigError("reference run needs a square grid");
  FieldSet f(static_cast<std::size_t>(program.field_count()), HaloField(gx, 2 * r));
  for (int q = 0; q < program.field_count(); ++q) {
    for (int i = 0; i < gy; ++i)
      for (int j = 0; j < gx; ++j) f[static_cast<std::size_t>(q)].at(i + r, j + r) = init.at(q, i, j);
    fill_periodic_halo(f[static_cast<std::size_t>(q)], r);
  }
  const Rect in{r, gy + r, r, gx + r};
  for (long k = 0; k < steps; ++k) {
    for (int s = 0; s < program.substeps(); ++s) {
      for (int q : program.exchanged(s, Frame::Fixed)) fill_periodic_halo(f[static_cast<std::size_t>(q)], r);
      program.compute(f, s, in, Frame::Fixed);
    }
  }
  GlobalState out(gx, gy, program.field_count());
  for (int q = 0; q < program.field_count(); ++q)
    for (int i = 0; i < gy; ++i)
      for (int j = 0; j < gx; ++j) out.at(q, i, j) = f[static_cast<std::size_t>(q)].at(i + r, j + r);
  return out;
}

double slowest_rate(const std::vector<Telemetry> &telemetry, double skip_fraction) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &t : telemetry) best = std::min(best, measured_rate(t, skip_fraction));
  return best;
}

}  // namespace dtrans
