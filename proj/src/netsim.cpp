#include "dtrans/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dtrans {

const char *to_string(Dir d) {
  switch (d) {
    case Dir::Right: return "right";
    case Dir::Left: return "left";
    case Dir::Up: return "up";
    case Dir::Down: return "down";
  }
  return "?";
}

Neighbor neighbor_of(Dir d) {
  switch (d) {
    case Dir::Right: return Neighbor::Right;
    case Dir::Left: return Neighbor::Left;
    case Dir::Up: return Neighbor::Up;
    case Dir::Down: return Neighbor::Down;
  }
  return Neighbor::Right;
}

const char *to_string(PackageKind k) {
  switch (k) {
    case PackageKind::Horizontal: return "horizontal";
    case PackageKind::Vertical: return "vertical";
    case PackageKind::Corner: return "corner";
    case PackageKind::Halo: return "halo";
  }
  return "?";
}

void LinkModel::validate() const {
  if (!(latency >= 0.0) || !std::isfinite(latency)) throw ConfigError("link latency must be finite and >= 0");
  if (!(bandwidth > 0.0)) throw ConfigError("link bandwidth must be > 0");
}

double Link::send(std::size_t bytes, double t_send) {
  const double start = std::max(t_send, free_time_);
  const double ser = model_.serialization(bytes);
  free_time_ = start + ser;
  ++counters_.sent_messages;
  counters_.sent_bytes += static_cast<long>(bytes);
  return start + model_.latency + ser;
}

Package Link::pop() {
  if (queue_.empty())
    throw DeadlockError(std::string("receive on empty ") + to_string(dir_) + " link " + std::to_string(src_) + " -> " +
                        std::to_string(dst_) + ": pipeline is miswired or a send is missing");
  Package p = std::move(queue_.front());
  queue_.pop_front();
  return p;
}

Network::Network(const TorusGeometry &geom, LinkModel model, LinkModel self_model) : geom_(geom) {
  model.validate();
  self_model.validate();
  links_.resize(static_cast<std::size_t>(geom.worker_count()) * 4);
  for (int w = 0; w < geom.worker_count(); ++w) {
    for (Dir d : {Dir::Right, Dir::Left, Dir::Up, Dir::Down}) {
      const int dst = geom.neighbor(w, neighbor_of(d));
      links_[index(w, d)] = Link(w, dst, d, dst == w ? self_model : model);
    }
  }
}

Link &Network::in(int dst, Dir d) {
  // The sender sits on the opposite side of dst.
  Neighbor from = Neighbor::Left;
  switch (d) {
    case Dir::Right: from = Neighbor::Left; break;
    case Dir::Left: from = Neighbor::Right; break;
    case Dir::Up: from = Neighbor::Down; break;
    case Dir::Down: from = Neighbor::Up; break;
  }
  return out(geom_.neighbor(dst, from), d);
}

long Network::total_sent() const {
  long s = 0;
  for (const auto &l : links_) s += l.counters().sent_messages;
  return s;
}

long Network::total_delivered() const {
  long s = 0;
  for (const auto &l : links_) s += l.counters().delivered_messages;
  return s;
}

long Network::messages_in(Dir d) const {
  long s = 0;
  for (const auto &l : links_)
    if (l.dir() == d) s += l.counters().sent_messages;
  return s;
}

void Network::write_counters_csv(std::ostream &os) const {
  os << "src,dst,dir,latency_s,bandwidth_Bps,sent_messages,delivered_messages,sent_bytes\n";
  for (const auto &l : links_) {
    os << l.src() << ',' << l.dst() << ',' << to_string(l.dir()) << ',' << l.model().latency << ','
       << l.model().bandwidth << ',' << l.counters().sent_messages << ',' << l.counters().delivered_messages << ','
       << l.counters().sent_bytes << '\n';
  }
}

void EventQueue::push(double time, std::function<void()> action) {
  heap_.push(Event{time, next_seq_++, std::move(action)});
}

EventQueue::Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

void Scheduler::at(double time, std::function<void()> action) {
  if (time < now_) throw RangeError("event scheduled in the past");
  queue_.push(time, std::move(action));
}

long Scheduler::run() {
  long count = 0;
  while (!queue_.empty()) {
    auto e = queue_.pop();
    now_ = e.time;
    e.action();
    ++count;
  }
  return count;
}

void Scheduler::trace(std::string what, int src, int dst, std::size_t bytes) {
  if (trace_on_) trace_.push_back({now_, std::move(what), src, dst, bytes});
}

void Scheduler::write_trace_csv(std::ostream &os) const {
  os << "time_s,event,src,dst,bytes\n";
  for (const auto &t : trace_) os << t.time << ',' << t.what << ',' << t.src << ',' << t.dst << ',' << t.bytes << '\n';
}

void transmit(Scheduler &sched, Link &link, std::size_t bytes, std::function<void()> on_arrival) {
  const double arrival = link.send(bytes, sched.now());
  sched.trace("send", link.src(), link.dst(), bytes);
  sched.at(arrival, [&sched, &link, bytes, cb = std::move(on_arrival)] {
    link.mark_delivered();
    sched.trace("deliver", link.src(), link.dst(), bytes);
    cb();
  });
}

double VirtualClock::advance(double cost_seconds) {
  if (cost_seconds < 0.0) throw RangeError("negative compute cost");
  time += cost_seconds;
  return time;
}

double measured_rate(const Telemetry &samples, double skip_fraction) {
  const std::size_t skip = static_cast<std::size_t>(std::floor(skip_fraction * static_cast<double>(samples.size())));
  if (samples.size() < skip + 2) throw RangeError("measured_rate needs at least two samples");
  double mt = 0, mi = 0;
  const auto first = samples.begin() + static_cast<std::ptrdiff_t>(skip);
  const double cnt = static_cast<double>(samples.end() - first);
  for (auto it = first; it != samples.end(); ++it) {
    mt += it->time;
    mi += static_cast<double>(it->iteration);
  }
  mt /= cnt;
  mi /= cnt;
  double sxy = 0, sxx = 0;
  for (auto it = first; it != samples.end(); ++it) {
    const double dt = it->time - mt;
    sxy += dt * (static_cast<double>(it->iteration) - mi);
    sxx += dt * dt;
  }
  if (sxx <= 0.0) throw RangeError("measured_rate: samples share one timestamp");
  return sxy / sxx;
}

}  // namespace dtrans
