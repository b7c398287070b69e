#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "dtrans/grid.hpp"

namespace dtrans {

// Direction of travel of a directed link.
enum class Dir { Right = 0, Left = 1, Up = 2, Down = 3 };
const char *to_string(Dir d);
Neighbor neighbor_of(Dir d);

enum class PackageKind { Horizontal, Vertical, Corner, Halo };
const char *to_string(PackageKind k);

// One message: a boundary payload tagged with the iteration that produced it.
struct Package {
  long iteration = 0;
  int substep = 0;
  PackageKind kind = PackageKind::Halo;
  std::vector<Scalar> payload;

  std::size_t byte_size() const { return payload.size() * sizeof(Scalar); }
};

// Latency in seconds, bandwidth in bytes/second. Infinite bandwidth is allowed.
struct LinkModel {
  double latency = 0.0;
  double bandwidth = std::numeric_limits<double>::infinity();

  void validate() const;
  double serialization(std::size_t bytes) const { return static_cast<double>(bytes) / bandwidth; }
};

struct LinkCounters {
  long sent_messages = 0;
  long delivered_messages = 0;
  long sent_bytes = 0;
};

// A directed, FIFO, store-and-forward link. The timing side tracks when the
// wire is next free; the payload side is a plain queue of packages.
class Link {
 public:
  Link() = default;
  Link(int src, int dst, Dir dir, LinkModel model) : src_(src), dst_(dst), dir_(dir), model_(model) {}

  int src() const { return src_; }
  int dst() const { return dst_; }
  Dir dir() const { return dir_; }
  const LinkModel &model() const { return model_; }
  void set_model(LinkModel m) { model_ = m; }

  // arrival = max(t_send, free) + latency + bytes/bandwidth; the wire stays
  // busy for bytes/bandwidth after the transmission starts.
  double send(std::size_t bytes, double t_send);
  void mark_delivered() { ++counters_.delivered_messages; }
  double free_time() const { return free_time_; }

  void push(Package p) { queue_.push_back(std::move(p)); }
  bool empty() const { return queue_.empty(); }
  Package pop();
  std::size_t queued() const { return queue_.size(); }

  const LinkCounters &counters() const { return counters_; }

 private:
  int src_ = 0, dst_ = 0;
  Dir dir_ = Dir::Right;
  LinkModel model_;
  double free_time_ = 0.0;
  LinkCounters counters_;
  std::deque<Package> queue_;
};

// The four outgoing links of every worker on a torus. Links from a worker
// to itself (one worker along an axis) use `self_model`.
class Network {
 public:
  Network(const TorusGeometry &geom, LinkModel model,
          LinkModel self_model = {0.0, std::numeric_limits<double>::infinity()});

  Link &out(int src, Dir d) { return links_[index(src, d)]; }
  const Link &out(int src, Dir d) const { return links_[index(src, d)]; }
  // The link arriving at `dst` that travels in direction d.
  Link &in(int dst, Dir d);

  std::vector<Link> &links() { return links_; }
  const std::vector<Link> &links() const { return links_; }
  const TorusGeometry &geometry() const { return geom_; }

  long total_sent() const;
  long total_delivered() const;
  long messages_in(Dir d) const;

  void write_counters_csv(std::ostream &os) const;

 private:
  static std::size_t index(int src, Dir d) { return static_cast<std::size_t>(src) * 4 + static_cast<std::size_t>(d); }
  TorusGeometry geom_;
  std::vector<Link> links_;
};

// Pending events keyed by (virtual time, insertion sequence).
class EventQueue {
 public:
  struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    std::function<void()> action;
  };

  void push(double time, std::function<void()> action);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event &a, const Event &b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct TraceEvent {
  double time = 0.0;
  std::string what;
  int src = -1, dst = -1;
  std::size_t bytes = 0;
};

// Single authority on virtual time.
class Scheduler {
 public:
  double now() const { return now_; }
  void at(double time, std::function<void()> action);
  void after(double delay, std::function<void()> action) { at(now_ + delay, std::move(action)); }
  // Runs until the queue is empty. Returns the number of events processed.
  long run();

  void enable_trace(bool on) { trace_on_ = on; }
  void trace(std::string what, int src = -1, int dst = -1, std::size_t bytes = 0);
  const std::vector<TraceEvent> &trace_log() const { return trace_; }
  void write_trace_csv(std::ostream &os) const;

 private:
  EventQueue queue_;
  double now_ = 0.0;
  bool trace_on_ = false;
  std::vector<TraceEvent> trace_;
};

// Sends a package's worth of bytes on `link` at the scheduler's current
// time and schedules `on_arrival` at the computed arrival time.
void transmit(Scheduler &sched, Link &link, std::size_t bytes, std::function<void()> on_arrival);

// Worker-local virtual clock.
struct VirtualClock {
  double time = 0.0;
  double advance(double cost_seconds);
};

struct TelemetrySample {
  long iteration = 0;
  double time = 0.0;
};

using Telemetry = std::vector<TelemetrySample>;

// Least-squares slope of iteration against virtual time, in steps/second.
// Samples before `skip_fraction` of the run (by index) are discarded.
double measured_rate(const Telemetry &samples, double skip_fraction = 0.0);

}  // namespace dtrans
