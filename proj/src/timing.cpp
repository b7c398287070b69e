#include "timing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

namespace dtrans {

namespace {

constexpr std::size_t kWord = sizeof(Scalar);

struct Clocked {
  long done = 0;
  bool busy = false;
  bool finished = false;
  double last_finish = 0.0;
  Telemetry tel;
};

class Sim {
 public:
  Sim(const StencilProgram &p, const RunConfig &cfg)
      : p_(p), cfg_(cfg), g_(cfg.geom), net_(cfg.geom, cfg.timing.link, cfg.timing.self_link),
        st_(static_cast<std::size_t>(cfg.geom.worker_count())) {
    sched_.enable_trace(cfg.timing.trace);
  }

  virtual ~Sim() = default;
  virtual void start() = 0;
  virtual std::string waiting_on(int id) const = 0;

  void finish_run(RunResult &res) {
    sched_.run();
    std::ostringstream stuck;
    for (int id = 0; id < g_.worker_count(); ++id) {
      if (!at(id).finished) stuck << "\n  worker " << id << " after " << at(id).done << " steps: " << waiting_on(id);
    }
    if (!stuck.str().empty())
      throw DeadlockError("no worker can progress and no message is in flight at t=" + std::to_string(sched_.now()) +
                          "s;" + stuck.str());
    res.telemetry.clear();
    res.end_time = 0.0;
    for (auto &s : st_) {
      res.end_time = std::max(res.end_time, s.last_finish);
      res.telemetry.push_back(std::move(s.tel));
    }
    res.steps_per_second = 0.0;
    if (!res.telemetry.empty() && res.telemetry.front().size() >= 2)
      res.steps_per_second = slowest_rate(res.telemetry, cfg_.timing.warmup_fraction);
    res.max_skew = max_skew_;
    res.sweeps_before_first_arrival = first_arrival_;
    res.trace = sched_.trace_log();
    res.timing_network = std::move(net_);
  }

 protected:
  Clocked &at(int id) { return st_[static_cast<std::size_t>(id)]; }
  const Clocked &at(int id) const { return st_[static_cast<std::size_t>(id)]; }

  void completed(int id) {
    Clocked &s = at(id);
    s.busy = false;
    ++s.done;
    s.last_finish = sched_.now();
    if (s.done % cfg_.timing.sample_every == 0 || s.done == cfg_.steps) s.tel.push_back({s.done, sched_.now()});
    if (s.done == cfg_.steps) s.finished = true;
    long lo = s.done, hi = s.done;
    for (const auto &o : st_) {
      lo = std::min(lo, o.done);
      hi = std::max(hi, o.done);
    }
    max_skew_ = std::max(max_skew_, hi - lo);
    sched_.trace("step", id, id, 0);
  }

  void note_arrival(int id) {
    if (id == 0 && first_arrival_ < 0) first_arrival_ = at(0).done;
  }

  std::size_t bytes(int substep, Frame frame, std::size_t cells) const {
    return p_.exchanged(substep, frame).size() * cells * kWord;
  }

  const StencilProgram &p_;
  const RunConfig &cfg_;
  TorusGeometry g_;
  Scheduler sched_;
  Network net_;
  std::vector<Clocked> st_;
  long max_skew_ = 0;
  long first_arrival_ = -1;
};

// Package P_j leaves a worker when sweep j ends (P_0 at t=0). A worker
// holds D = ceil(n/2r) sweeps of work ahead of its upstream inputs, so
// sweep k needs P_{k-D-1} from the left (horizontal) and from below
// (vertical plus the corner the lower worker forwards on arrival of its
// own horizontal package).
class TranslationSim final : public Sim {
 public:
  TranslationSim(const StencilProgram &p, const RunConfig &cfg) : Sim(p, cfg) {
    const int r = p.radius(), w = 2 * r, n = g_.n;
    depth_ = (n + w - 1) / w;
    S_ = p.substeps();
    for (int s = 0; s < S_; ++s) {
      edge_.push_back(bytes(s, Frame::Translating, static_cast<std::size_t>(n) * w));
      corner_.push_back(bytes(s, Frame::Translating, static_cast<std::size_t>(w) * w));
    }
    T_ = cfg.timing.sweep_time(n, n);
    h_.assign(st_.size(), 0);
    v_.assign(st_.size(), 0);
    c_.assign(st_.size(), 0);
  }

  void start() override {
    for (int id = 0; id < g_.worker_count(); ++id) {
      if (cfg_.steps > 0) emit(id);
      try_start(id);
    }
  }

  std::string waiting_on(int id) const override {
    const long need = std::max(0L, at(id).done + 1 - depth_) * S_;
    return "needs " + std::to_string(need) + " messages per input; have horizontal " + std::to_string(h_[idx(id)]) +
           ", vertical " + std::to_string(v_[idx(id)]) + ", corner " + std::to_string(c_[idx(id)]);
  }

 private:
  static std::size_t idx(int id) { return static_cast<std::size_t>(id); }

  void emit(int id) {
    for (int s = 0; s < S_; ++s) {
      Link &right = net_.out(id, Dir::Right);
      const int rdst = right.dst();
      const std::size_t cb = corner_[static_cast<std::size_t>(s)];
      transmit(sched_, right, edge_[static_cast<std::size_t>(s)], [this, rdst, cb] {
        ++h_[idx(rdst)];
        note_arrival(rdst);
        Link &up = net_.out(rdst, Dir::Up);
        const int udst = up.dst();
        transmit(sched_, up, cb, [this, udst] {
          ++c_[idx(udst)];
          try_start(udst);
        });
        try_start(rdst);
      });
      Link &up = net_.out(id, Dir::Up);
      const int udst = up.dst();
      transmit(sched_, up, edge_[static_cast<std::size_t>(s)], [this, udst] {
        ++v_[idx(udst)];
        try_start(udst);
      });
    }
  }

  void try_start(int id) {
    Clocked &s = at(id);
    if (s.busy || s.finished || s.done >= cfg_.steps) return;
    const long k = s.done + 1;
    const long need = k - depth_ - 1;
    if (need >= 0) {
      const long msgs = (need + 1) * S_;
      if (h_[idx(id)] < msgs || v_[idx(id)] < msgs || c_[idx(id)] < msgs) return;
    }
    s.busy = true;
    sched_.after(T_, [this, id] {
      completed(id);
      if (at(id).done < cfg_.steps) emit(id);
      try_start(id);
    });
  }

  long depth_ = 1;
  int S_ = 1;
  double T_ = 0.0;
  std::vector<std::size_t> edge_, corner_;
  std::vector<long> h_, v_, c_;
};

// Fixed partition: exchange columns with both horizontal neighbours, then
// full-width rows with both vertical neighbours, then compute. The static
// method exchanges before every sub-step; the ghost method every p_g steps
// with a wider band and recomputes the overlap.
class FixedSim final : public Sim {
 public:
  FixedSim(const StencilProgram &p, const RunConfig &cfg) : Sim(p, cfg) {
    const int n = g_.n;
    S_ = p.substeps();
    ghost_ = cfg.method.method == Method::Ghost;
    period_ = ghost_ ? cfg.method.ghost_steps : 1;
    band_ = ghost_ ? cfg.method.ghost_width(p.radius()) : p.radius();
    const int lo = band_;
    // compute time of each step within one exchange period
    Rect valid{0, n + 2 * band_, 0, n + 2 * band_};
    for (int k = 0; k < period_; ++k) {
      double t = 0;
      for (int s = 0; s < S_; ++s) {
        const Rect out = ghost_ ? p.shrink(valid, s) : Rect{lo, lo + n, lo, lo + n};
        t += cfg.timing.sweep_time(out.rows(), n) / S_;
        valid = out;
      }
      step_cost_.push_back(t);
    }
    phases_ = ghost_ ? 1 : S_;  // exchanges per exchange point
    for (int s = 0; s < phases_; ++s) {
      hb_.push_back(bytes(s, Frame::Fixed, static_cast<std::size_t>(n) * band_));
      vb_.push_back(bytes(s, Frame::Fixed, static_cast<std::size_t>(n + 2 * band_) * band_));
    }
    recv_.assign(st_.size(), {0, 0, 0, 0});
    ws_.assign(st_.size(), {});
  }

  void start() override {
    for (int id = 0; id < g_.worker_count(); ++id) advance(id);
  }

  std::string waiting_on(int id) const override {
    const auto &w = ws_[static_cast<std::size_t>(id)];
    const auto &r = recv_[static_cast<std::size_t>(id)];
    return "exchange " + std::to_string(w.exchange) + " stage " + std::to_string(w.stage) + "; received right " +
           std::to_string(r[0]) + ", left " + std::to_string(r[1]) + ", up " + std::to_string(r[2]) + ", down " +
           std::to_string(r[3]);
  }

 private:
  struct WState {
    int substep = 0;
    int stage = 0;  // 0 send columns, 1 wait columns, 2 wait rows, 3 computing
    long exchange = 0;
  };

  void send(int id, Dir d, std::size_t b) {
    Link &l = net_.out(id, d);
    const int dst = l.dst();
    transmit(sched_, l, b, [this, dst, d] {
      ++recv_[static_cast<std::size_t>(dst)][static_cast<std::size_t>(d)];
      note_arrival(dst);
      advance(dst);
    });
  }

  bool exchange_due(const Clocked &c, const WState &w) const {
    if (!ghost_) return true;
    return w.substep == 0 && c.done % period_ == 0;
  }

  void advance(int id) {
    Clocked &c = at(id);
    WState &w = ws_[static_cast<std::size_t>(id)];
    auto &r = recv_[static_cast<std::size_t>(id)];
    for (;;) {
      if (c.finished || c.done >= cfg_.steps || w.stage == 3) return;
      const std::size_t ph = static_cast<std::size_t>(ghost_ ? 0 : w.substep);
      const long need = w.exchange + 1;
      if (w.stage == 0) {
        if (!exchange_due(c, w)) {
          w.stage = 3;
          compute(id);
          return;
        }
        send(id, Dir::Left, hb_[ph]);
        send(id, Dir::Right, hb_[ph]);
        w.stage = 1;
      } else if (w.stage == 1) {
        if (r[0] < need || r[1] < need) return;
        send(id, Dir::Up, vb_[ph]);
        send(id, Dir::Down, vb_[ph]);
        w.stage = 2;
      } else if (w.stage == 2) {
        if (r[2] < need || r[3] < need) return;
        ++w.exchange;
        w.stage = 3;
        compute(id);
        return;
      }
    }
  }

  void compute(int id) {
    Clocked &c = at(id);
    c.busy = true;
    const double cost = step_cost_[static_cast<std::size_t>(c.done % period_)] / (ghost_ ? 1 : S_);
    sched_.after(cost, [this, id] {
      WState &w = ws_[static_cast<std::size_t>(id)];
      w.stage = 0;
      if (ghost_ || ++w.substep == S_) {
        w.substep = 0;
        completed(id);
      }
      at(id).busy = false;
      advance(id);
    });
  }

  int S_ = 1, period_ = 1, band_ = 1, phases_ = 1;
  bool ghost_ = false;
  std::vector<double> step_cost_;
  std::vector<std::size_t> hb_, vb_;
  std::vector<std::array<long, 4>> recv_;
  std::vector<WState> ws_;
};

}  // namespace

void simulate_timing(const StencilProgram &program, const RunConfig &cfg, RunResult &res) {
  if (cfg.timing.sample_every < 1) throw ConfigError("telemetry sample interval must be >= 1");
  if (cfg.timing.warmup_fraction < 0 || cfg.timing.warmup_fraction >= 1)
    throw ConfigError("warm-up fraction must be in [0, 1)");
  std::unique_ptr<Sim> sim;
  if (cfg.method.method == Method::Translation)
    sim = std::make_unique<TranslationSim>(program, cfg);
  else
    sim = std::make_unique<FixedSim>(program, cfg);
  sim->start();
  sim->finish_run(res);
}

}  // namespace dtrans
