// Copyright 2026 The fhctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fhctl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "fhctl/gtpu.hpp"

namespace fhctl {
namespace {

using Ns = std::int64_t;
using nlohmann::json;

constexpr std::uint16_t kPlainUdpPort = 5001;
constexpr std::int64_t kDefaultClass = std::numeric_limits<std::int64_t>::max();
constexpr int kMaxHops = 64;
constexpr std::uint32_t kMinPacket = 64;
constexpr std::uint32_t kMaxPacket = 9000;
// Ethernet + IPv4 + UDP + GTP-U mandatory header.
constexpr std::uint32_t kGtpuOverhead = 14 + 20 + 8 + 8;
// DRR quantum for the slowest class on a port; at least one jumbo frame.
constexpr double kBaseQuantum = kMaxPacket;
constexpr double kTokenSlack = 1e-6;

Ns to_ns(double s) { return static_cast<Ns>(std::llround(s * 1e9)); }
double to_s(Ns t) { return static_cast<double>(t) / 1e9; }
// Serialization delay, rounded up to a whole nanosecond.
Ns tx_time(std::uint32_t bytes, double mbps) {
  return static_cast<Ns>(std::ceil(static_cast<double>(bytes) * 8.0 * 1e3 / mbps));
}

enum class EventKind : std::uint8_t { kCallback, kGenerate, kTxDone, kArrive, kWake };

struct Event {
  Ns t = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kCallback;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
};

struct Later {
  bool operator()(const Event& x, const Event& y) const {
    return x.t != y.t ? x.t > y.t : x.seq > y.seq;
  }
};

struct Packet {
  std::uint32_t flow = 0;
  std::uint32_t size = 0;
  Ns sent = 0;
  std::uint16_t hops = 0;
};

struct ClassState {
  bool shaped = false;
  std::uint32_t queue_id = 0;
  QueueType type = QueueType::kLinuxHtb;
  std::uint64_t generation = 0;
  double rate_mbps = 0.0;
  double bytes_per_ns = 0.0;
  double depth = 0.0;
  double tokens = 0.0;
  Ns last_refill = 0;
  std::uint64_t buffer = 0;
  std::uint64_t backlog = 0;
  std::deque<std::uint64_t> packets;
  double deficit = 0.0;
};

struct PortState {
  PortRef ref;
  std::optional<std::size_t> link;
  double rate_mbps = 0.0;
  bool busy = false;
  std::uint64_t in_service = 0;
  Ns wake_at = -1;
  // Keyed by queue id; the unshaped default class sorts last.
  std::map<std::int64_t, ClassState> classes;
  std::int64_t cursor = 0;
  bool visit_open = false;
};

struct QueueCounters {
  std::uint64_t enqueued = 0;
  std::uint64_t dequeued = 0;
  std::uint64_t shaped_drops = 0;
};

enum class DropReason { kPunt, kPolicy, kQueue, kLinkDown, kNoHost, kQueueRemoved, kLoop };

struct FlowState {
  TrafficFlow spec;
  PacketHeader header;
  PortRef ingress;
  bool resolved = false;
  Ns start = 0;
  Ns stop = 0;
  double interval_ns = 0.0;
  double phase_ns = 0.0;
  std::uint64_t next_index = 0;
  std::uint64_t live = 0;
  FlowReport report;
};

}  // namespace

struct Simulator::Impl {
  Impl(Simulator& o, Dataplane& d, const HostRegistry& h, SimOptions opt)
      : owner(o), dp(d), hosts(h), options(opt), rng(opt.seed) {
    if (options.bin_width_s <= 0) options.bin_width_s = 0.5;
    bin_ns = std::max<Ns>(1, to_ns(options.bin_width_s));
    const Topology& topo = dp.topology();
    for (const auto& [id, dev] : topo.devices()) {
      port_base[id] = ports.size();
      for (std::uint32_t p = 1; p <= dev.ports; ++p) {
        PortState ps;
        ps.ref = {id, p};
        ps.link = topo.link_from(ps.ref);
        ps.rate_mbps = topo.port_rate_mbps(ps.ref);
        ClassState def;
        def.buffer = options.port_buffer_bytes;
        ps.classes.emplace(kDefaultClass, std::move(def));
        ps.cursor = kDefaultClass;
        ports.push_back(std::move(ps));
      }
    }
    link_tx.assign(topo.links().size(), 0);
  }

  Simulator& owner;
  Dataplane& dp;
  const HostRegistry& hosts;
  SimOptions options;
  std::mt19937_64 rng;
  Ns bin_ns = 0;
  Ns now = 0;
  std::uint64_t seq = 0;
  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::vector<std::function<void()>> callbacks;

  std::vector<Packet> packets;
  std::vector<std::uint64_t> free_packets;
  std::vector<FlowState> flows;
  std::vector<PortState> ports;
  std::map<DeviceId, std::size_t> port_base;
  std::map<QueueKey, QueueCounters> queue_stats;
  std::vector<std::uint64_t> link_tx;
  std::uint64_t punt_count = 0;

  void push(Ns t, EventKind kind, std::uint64_t a = 0, std::uint64_t b = 0) {
    events.push(Event{std::max(t, now), seq++, kind, a, b});
  }

  std::optional<std::size_t> slot_of(const PortRef& ref) const {
    auto it = port_base.find(ref.device);
    if (it == port_base.end()) return std::nullopt;
    const Device* dev = dp.topology().device(ref.device);
    if (ref.port < 1 || ref.port > dev->ports) return std::nullopt;
    return it->second + ref.port - 1;
  }

  FlowBin& bin_for(FlowState& f, Ns sent) {
    auto index = static_cast<std::size_t>(sent / bin_ns);
    if (f.report.bins.size() <= index) f.report.bins.resize(index + 1);
    return f.report.bins[index];
  }

  std::uint64_t alloc_packet(const Packet& p) {
    if (!free_packets.empty()) {
      std::uint64_t id = free_packets.back();
      free_packets.pop_back();
      packets[id] = p;
      return id;
    }
    packets.push_back(p);
    return packets.size() - 1;
  }

  void release(std::uint64_t pid) {
    --flows[packets[pid].flow].live;
    free_packets.push_back(pid);
  }

  void drop(std::uint64_t pid, DropReason reason) {
    const Packet& p = packets[pid];
    FlowState& f = flows[p.flow];
    DropCounters& d = f.report.drops;
    switch (reason) {
      case DropReason::kPunt: ++d.punt; break;
      case DropReason::kPolicy: ++d.policy; break;
      case DropReason::kQueue: ++d.queue; break;
      case DropReason::kLinkDown: ++d.link_down; break;
      case DropReason::kNoHost: ++d.no_host; break;
      case DropReason::kQueueRemoved: ++d.queue_removed; break;
      case DropReason::kLoop: ++d.loop; break;
    }
    ++f.report.dropped;
    ++bin_for(f, p.sent).dropped;
    release(pid);
  }

  void flush_class(ClassState& c, DropReason reason) {
    for (std::uint64_t pid : c.packets) drop(pid, reason);
    c.packets.clear();
    c.backlog = 0;
    c.deficit = 0;
  }

  ClassState make_shaped(const QueueConfig& cfg, std::uint64_t generation) const {
    ClassState c;
    c.shaped = true;
    c.queue_id = cfg.queue_id;
    c.type = cfg.queue_type;
    c.generation = generation;
    c.rate_mbps = cfg.max_rate_mbps;
    c.bytes_per_ns = cfg.max_rate_mbps * 1e6 / 8.0 / 1e9;
    c.depth = std::max<double>(static_cast<double>(cfg.buffer_bytes), kMaxPacket);
    c.tokens = 0.0;
    c.last_refill = now;
    c.buffer = cfg.buffer_bytes;
    return c;
  }

  // Drops shaping classes whose queue config vanished or was replaced.
  void refresh_classes(PortState& ps) {
    for (auto it = ps.classes.begin(); it != ps.classes.end();) {
      ClassState& c = it->second;
      if (c.shaped) {
        QueueKey key{ps.ref.device, ps.ref.port, static_cast<std::uint32_t>(it->first)};
        if (dp.queue_generation(key) != c.generation) {
          flush_class(c, DropReason::kQueueRemoved);
          it = ps.classes.erase(it);
          continue;
        }
      }
      ++it;
    }
  }

  void refill(ClassState& c) {
    if (!c.shaped || c.last_refill == now) return;
    c.tokens = std::min(c.depth, c.tokens + static_cast<double>(now - c.last_refill) * c.bytes_per_ns);
    c.last_refill = now;
  }

  // Whether the head packet may go now; otherwise lowers `earliest` to the
  // time the shaper will have enough tokens.
  bool eligible(ClassState& c, Ns& earliest) {
    if (c.packets.empty()) return false;
    if (!c.shaped) return true;
    refill(c);
    double need = packets[c.packets.front()].size;
    if (c.tokens + kTokenSlack >= need) return true;
    Ns wait = static_cast<Ns>(std::ceil((need - c.tokens) / c.bytes_per_ns));
    earliest = std::min(earliest, now + std::max<Ns>(1, wait));
    return false;
  }

  double class_rate(const PortState& ps, const ClassState& c) const { return c.shaped ? c.rate_mbps : ps.rate_mbps; }

  ClassState* pick_class(PortState& ps, Ns& earliest) {
    bool strict = false;
    for (const auto& [qid, c] : ps.classes) {
      if (c.shaped && c.type == QueueType::kProntoStrict) strict = true;
    }
    if (strict) {
      for (auto& [qid, c] : ps.classes) {
        if (eligible(c, earliest)) return &c;
      }
      return nullptr;
    }

    std::vector<std::int64_t> keys;
    bool any = false;
    double min_rate = std::numeric_limits<double>::infinity();
    for (auto& [qid, c] : ps.classes) {
      if (c.packets.empty()) continue;
      keys.push_back(qid);
      min_rate = std::min(min_rate, class_rate(ps, c));
      if (eligible(c, earliest)) any = true;
    }
    if (!any) return nullptr;

    std::size_t i = 0;
    while (i < keys.size() && keys[i] < ps.cursor) ++i;
    if (i == keys.size() || keys[i] != ps.cursor) ps.visit_open = false;
    if (i == keys.size()) i = 0;

    Ns unused = std::numeric_limits<Ns>::max();
    for (;;) {
      ClassState& c = ps.classes.at(keys[i]);
      if (eligible(c, unused)) {
        if (!ps.visit_open) {
          c.deficit += kBaseQuantum * class_rate(ps, c) / min_rate;
          ps.visit_open = true;
          ps.cursor = keys[i];
        }
        if (c.deficit >= packets[c.packets.front()].size) {
          c.deficit -= packets[c.packets.front()].size;
          return &c;
        }
      }
      ps.visit_open = false;
      i = (i + 1) % keys.size();
      ps.cursor = keys[i];
    }
  }

  void try_start(std::size_t slot) {
    PortState& ps = ports[slot];
    if (ps.busy) return;
    if (ps.link && !dp.topology().link_up(*ps.link)) {
      for (auto& [qid, c] : ps.classes) flush_class(c, DropReason::kLinkDown);
      return;
    }
    refresh_classes(ps);
    Ns earliest = std::numeric_limits<Ns>::max();
    ClassState* c = pick_class(ps, earliest);
    if (c == nullptr) {
      if (earliest != std::numeric_limits<Ns>::max() && !(ps.wake_at > now && ps.wake_at <= earliest)) {
        ps.wake_at = earliest;
        push(earliest, EventKind::kWake, slot);
      }
      return;
    }
    std::uint64_t pid = c->packets.front();
    c->packets.pop_front();
    const std::uint32_t size = packets[pid].size;
    c->backlog -= size;
    if (c->packets.empty()) c->deficit = 0;
    if (c->shaped) {
      c->tokens -= size;
      ++queue_stats[{ps.ref.device, ps.ref.port, c->queue_id}].dequeued;
    }
    ps.busy = true;
    ps.in_service = pid;
    push(now + tx_time(size, ps.rate_mbps), EventKind::kTxDone, slot);
  }

  void enqueue(std::uint64_t pid, std::size_t slot, std::optional<std::uint32_t> queue_id) {
    PortState& ps = ports[slot];
    if (ps.link && !dp.topology().link_up(*ps.link)) {
      drop(pid, DropReason::kLinkDown);
      return;
    }
    std::int64_t key = kDefaultClass;
    if (queue_id) {
      if (const QueueConfig* cfg = dp.find_queue(ps.ref.device, ps.ref.port, *queue_id)) {
        const std::uint64_t gen = dp.queue_generation(queue_key(*cfg));
        auto it = ps.classes.find(*queue_id);
        if (it != ps.classes.end() && it->second.generation != gen) {
          flush_class(it->second, DropReason::kQueueRemoved);
          ps.classes.erase(it);
          it = ps.classes.end();
        }
        if (it == ps.classes.end()) ps.classes.emplace(*queue_id, make_shaped(*cfg, gen));
        key = *queue_id;
      }
    }
    ClassState& c = ps.classes.at(key);
    const std::uint32_t size = packets[pid].size;
    if (c.backlog + size > c.buffer) {
      if (c.shaped) ++queue_stats[{ps.ref.device, ps.ref.port, *queue_id}].shaped_drops;
      drop(pid, DropReason::kQueue);
      return;
    }
    if (c.shaped) ++queue_stats[{ps.ref.device, ps.ref.port, *queue_id}].enqueued;
    c.packets.push_back(pid);
    c.backlog += size;
    try_start(slot);
  }

  void deliver(std::uint64_t pid, const PortState& ps) {
    FlowState& f = flows[packets[pid].flow];
    const EdgeHost* target = nullptr;
    for (const EdgeHost* h : hosts.at_port(ps.ref)) {
      if (h->mac == f.header.eth_dst) {
        target = h;
        break;
      }
      if (target == nullptr) target = h;
    }
    if (target == nullptr) {
      drop(pid, DropReason::kNoHost);
      return;
    }
    const Packet& p = packets[pid];
    ++f.report.delivered;
    f.report.delivered_bytes += p.size;
    ++f.report.delivered_to[target->id()];
    FlowBin& bin = bin_for(f, p.sent);
    ++bin.delivered;
    ++bin.delivered_to[target->id()];
    release(pid);
  }

  void punt(std::uint64_t pid, const DeviceId& device, std::uint32_t in_port) {
    const FlowState& f = flows[packets[pid].flow];
    PuntEvent ev;
    ev.time_s = to_s(now);
    ev.device = device;
    ev.in_port = in_port;
    ev.eth_src = f.header.eth_src;
    ev.eth_dst = f.header.eth_dst;
    ev.ip_src = f.header.ip_src;
    ev.ip_dst = f.header.ip_dst;
    ev.teid = f.header.teid;
    ev.flow_id = f.spec.flow_id;
    ++punt_count;
    owner.punts_.push_back(ev);
    const PuntVerdict verdict = owner.punt_handler_ ? owner.punt_handler_(ev) : PuntVerdict::kDrop;
    if (verdict == PuntVerdict::kReinject) {
      process(pid, device, in_port);
      return;
    }
    drop(pid, DropReason::kPunt);
  }

  void process(std::uint64_t pid, const DeviceId& device, std::uint32_t in_port) {
    if (++packets[pid].hops > kMaxHops) {
      drop(pid, DropReason::kLoop);
      return;
    }
    const FlowState& f = flows[packets[pid].flow];
    MatchResult match = dp.match_packet(device, f.header, in_port);
    if (match.punt()) {
      punt(pid, device, in_port);
      return;
    }
    std::optional<std::uint32_t> out;
    std::optional<std::uint32_t> queue;
    bool dropped = false;
    bool punted = false;
    for (const FlowAction& a : match.rule->actions) {
      switch (a.type) {
        case ActionType::kOutput: out = a.arg; break;
        case ActionType::kSetQueue: queue = a.arg; break;
        case ActionType::kDrop: dropped = true; break;
        case ActionType::kPunt: punted = true; break;
      }
    }
    if (punted && !out) {
      punt(pid, device, in_port);
      return;
    }
    if (dropped || !out) {
      drop(pid, DropReason::kPolicy);
      return;
    }
    std::optional<std::size_t> slot = slot_of({device, *out});
    if (!slot) {
      drop(pid, DropReason::kPolicy);
      return;
    }
    enqueue(pid, *slot, queue);
  }

  bool resolve(FlowState& f) {
    const EdgeHost* src = hosts.find(f.spec.src_host);
    const EdgeHost* dst = hosts.find(f.spec.dst_host);
    if (src == nullptr || dst == nullptr) {
      f.report.error = "UNKNOWN_HOST " + (src == nullptr ? f.spec.src_host : f.spec.dst_host).to_string();
      return false;
    }
    PacketHeader& h = f.header;
    h.eth_src = src->mac;
    h.eth_dst = dst->mac;
    h.vlan = src->vlan;
    h.ip_src = src->primary_ip();
    h.ip_dst = dst->primary_ip();
    if (f.spec.gtpu_teid) {
      h.udp_src = gtpu::kUdpPort;
      h.udp_dst = gtpu::kUdpPort;
      gtpu::Header gh;
      gh.teid = *f.spec.gtpu_teid;
      const std::uint32_t inner = f.spec.packet_size > kGtpuOverhead ? f.spec.packet_size - kGtpuOverhead : 0;
      std::vector<std::uint8_t> body(inner, 0);
      auto encoded = gtpu::encode(gh, body);
      if (!encoded.ok()) {
        f.report.error = encoded.error().to_string();
        return false;
      }
      h.teid = gtpu::peek_teid(*encoded);
      h.udp_payload = std::make_shared<const std::vector<std::uint8_t>>(std::move(*encoded));
    } else {
      h.udp_src = kPlainUdpPort;
      h.udp_dst = kPlainUdpPort;
    }
    f.ingress = {src->device, src->port};
    f.resolved = true;
    return true;
  }

  void generate(std::uint32_t index) {
    FlowState& f = flows[index];
    if (!f.resolved && !resolve(f)) return;
    Packet p;
    p.flow = index;
    p.size = f.spec.packet_size;
    p.sent = now;
    std::uint64_t pid = alloc_packet(p);
    ++f.live;
    ++f.report.sent;
    ++bin_for(f, now).sent;
    ++f.next_index;
    Ns next = f.start + static_cast<Ns>(std::llround(f.phase_ns + static_cast<double>(f.next_index) * f.interval_ns));
    if (next < f.stop) push(next, EventKind::kGenerate, index);
    const PortRef ingress = f.ingress;
    process(pid, ingress.device, ingress.port);
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::kCallback: {
        auto fn = std::move(callbacks[ev.a]);
        callbacks[ev.a] = nullptr;
        if (fn) fn();
        break;
      }
      case EventKind::kGenerate:
        generate(static_cast<std::uint32_t>(ev.a));
        break;
      case EventKind::kTxDone: {
        PortState& ps = ports[ev.a];
        ps.busy = false;
        std::uint64_t pid = ps.in_service;
        if (ps.link) {
          const Topology& topo = dp.topology();
          if (!topo.link_up(*ps.link)) {
            drop(pid, DropReason::kLinkDown);
          } else {
            link_tx[*ps.link] += packets[pid].size;
            push(now + static_cast<Ns>(topo.link(*ps.link).latency_us) * 1000, EventKind::kArrive, pid, *ps.link);
          }
        } else {
          deliver(pid, ps);
        }
        try_start(ev.a);
        break;
      }
      case EventKind::kArrive: {
        const Topology& topo = dp.topology();
        if (!topo.link_up(ev.b)) {
          drop(ev.a, DropReason::kLinkDown);
        } else {
          const PortRef dst = topo.link(ev.b).dst;
          process(ev.a, dst.device, dst.port);
        }
        break;
      }
      case EventKind::kWake:
        if (ports[ev.a].wake_at == ev.t) ports[ev.a].wake_at = -1;
        try_start(ev.a);
        break;
    }
  }

  SimReport build_report() const {
    SimReport r;
    r.until_s = to_s(now);
    r.seed = options.seed;
    r.bin_width_s = to_s(bin_ns);
    r.punts = punt_count;
    for (const FlowState& f : flows) {
      FlowReport fr = f.report;
      fr.in_flight = f.live;
      const Ns end = std::min(f.stop, now);
      if (end > f.start) fr.achieved_rate_mbps = static_cast<double>(fr.delivered_bytes) * 8.0 / to_s(end - f.start) / 1e6;
      if (!fr.conserved()) r.conservation_ok = false;
      r.flows.push_back(std::move(fr));
    }
    for (const auto& [key, stats] : queue_stats) {
      QueueReport q;
      q.device = std::get<0>(key);
      q.port = std::get<1>(key);
      q.queue_id = std::get<2>(key);
      q.enqueued = stats.enqueued;
      q.dequeued = stats.dequeued;
      q.shaped_drops = stats.shaped_drops;
      r.queues.push_back(q);
    }
    const Topology& topo = dp.topology();
    for (std::size_t i = 0; i < topo.links().size(); ++i) {
      LinkReport l;
      l.src = topo.link(i).src;
      l.dst = topo.link(i).dst;
      l.capacity_mbps = topo.link(i).capacity_mbps;
      l.tx_bytes = link_tx[i];
      if (now > 0) l.rate_mbps = static_cast<double>(link_tx[i]) * 8.0 / to_s(now) / 1e6;
      r.links.push_back(l);
    }
    return r;
  }
};

Simulator::Simulator(Dataplane& dataplane, const HostRegistry& hosts, SimOptions options)
    : impl_(std::make_unique<Impl>(*this, dataplane, hosts, options)) {}

Simulator::~Simulator() = default;

Status Simulator::add_flow(const TrafficFlow& flow) {
  Impl& s = *impl_;
  if (flow.flow_id.empty()) return Error{Errc::kInvalidArgument, "flow id is empty"};
  for (const FlowState& f : s.flows) {
    if (f.spec.flow_id == flow.flow_id) return Error{Errc::kInvalidArgument, "duplicate flow id " + flow.flow_id};
  }
  if (!(flow.offered_rate_mbps > 0)) return Error{Errc::kInvalidArgument, "flow rate must be positive"};
  if (flow.packet_size < kMinPacket || flow.packet_size > kMaxPacket) {
    return Error{Errc::kInvalidArgument, "packet size must be within [64, 9000]"};
  }
  if (flow.start_s < 0 || !(flow.stop_s > flow.start_s)) return Error{Errc::kInvalidArgument, "flow needs 0 <= start < stop"};
  if (to_ns(flow.start_s) < s.now) return Error{Errc::kInvalidArgument, "flow starts in the past"};

  FlowState f;
  f.spec = flow;
  f.report.flow = flow;
  f.start = to_ns(flow.start_s);
  f.stop = to_ns(flow.stop_s);
  f.interval_ns = static_cast<double>(flow.packet_size) * 8.0 * 1e3 / flow.offered_rate_mbps;
  // 53 random bits give a uniform phase in [0, interval).
  const double u = static_cast<double>(s.rng() >> 11) * 0x1.0p-53;
  f.phase_ns = u * f.interval_ns;
  const Ns first = f.start + static_cast<Ns>(std::llround(f.phase_ns));
  s.flows.push_back(std::move(f));
  if (first < s.flows.back().stop) s.push(first, EventKind::kGenerate, s.flows.size() - 1);
  return ok_status();
}

void Simulator::schedule(double at_s, std::function<void()> fn) {
  impl_->callbacks.push_back(std::move(fn));
  impl_->push(to_ns(at_s), EventKind::kCallback, impl_->callbacks.size() - 1);
}

SimReport Simulator::run(double until_s) {
  Impl& s = *impl_;
  const Ns until = to_ns(until_s);
  while (!s.events.empty() && s.events.top().t <= until) {
    Event ev = s.events.top();
    s.events.pop();
    s.now = ev.t;
    s.dispatch(ev);
  }
  s.now = std::max(s.now, until);
  return s.build_report();
}

SimReport Simulator::report() const { return impl_->build_report(); }

double Simulator::now_s() const { return to_s(impl_->now); }

// --- report -----------------------------------------------------------------

const FlowReport* SimReport::flow(const std::string& id) const {
  for (const FlowReport& f : flows) {
    if (f.flow.flow_id == id) return &f;
  }
  return nullptr;
}

std::optional<double> SimReport::delivered_fraction(const std::string& flow_id, double from_s, double to_s,
                                                    const std::optional<HostId>& host) const {
  const FlowReport* f = flow(flow_id);
  if (f == nullptr) return std::nullopt;
  std::uint64_t sent = 0;
  std::uint64_t hit = 0;
  constexpr double kEdge = 1e-9;
  for (std::size_t i = 0; i < f->bins.size(); ++i) {
    const double lo = static_cast<double>(i) * bin_width_s;
    const double hi = lo + bin_width_s;
    if (lo + kEdge < from_s || hi - kEdge > to_s) continue;
    const FlowBin& b = f->bins[i];
    sent += b.sent;
    if (host) {
      auto it = b.delivered_to.find(*host);
      if (it != b.delivered_to.end()) hit += it->second;
    } else {
      hit += b.delivered;
    }
  }
  if (sent == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(sent);
}

namespace {

json delivered_to_json(const std::map<HostId, std::uint64_t>& m) {
  json out = json::object();
  for (const auto& [host, n] : m) out[host.to_string()] = n;
  return out;
}

json port_json(const PortRef& p) { return {{"device", p.device.to_string()}, {"port", p.port}}; }

}  // namespace

json SimReport::to_json() const {
  json flows_doc = json::array();
  for (const FlowReport& f : flows) {
    json bins_doc = json::array();
    for (std::size_t i = 0; i < f.bins.size(); ++i) {
      const FlowBin& b = f.bins[i];
      bins_doc.push_back({{"start", static_cast<double>(i) * bin_width_s},
                          {"sent", b.sent},
                          {"delivered", b.delivered},
                          {"dropped", b.dropped},
                          {"delivered_to", delivered_to_json(b.delivered_to)}});
    }
    json doc = {{"id", f.flow.flow_id},
                {"src", f.flow.src_host.to_string()},
                {"dst", f.flow.dst_host.to_string()},
                {"offered_rate", f.flow.offered_rate_mbps},
                {"packet_size", f.flow.packet_size},
                {"sent", f.sent},
                {"delivered", f.delivered},
                {"dropped", f.dropped},
                {"in_flight", f.in_flight},
                {"delivered_bytes", f.delivered_bytes},
                {"achieved_rate", f.achieved_rate_mbps},
                {"drops",
                 {{"punt", f.drops.punt},
                  {"policy", f.drops.policy},
                  {"queue", f.drops.queue},
                  {"link_down", f.drops.link_down},
                  {"no_host", f.drops.no_host},
                  {"queue_removed", f.drops.queue_removed},
                  {"loop", f.drops.loop}}},
                {"delivered_to", delivered_to_json(f.delivered_to)},
                {"bins", std::move(bins_doc)}};
    if (f.flow.gtpu_teid) doc["teid"] = *f.flow.gtpu_teid;
    if (f.error) doc["error"] = *f.error;
    flows_doc.push_back(std::move(doc));
  }
  json queues_doc = json::array();
  for (const QueueReport& q : queues) {
    queues_doc.push_back({{"device", q.device.to_string()},
                          {"port", q.port},
                          {"queue_id", q.queue_id},
                          {"enqueued", q.enqueued},
                          {"dequeued", q.dequeued},
                          {"shaped_drops", q.shaped_drops}});
  }
  json links_doc = json::array();
  for (const LinkReport& l : links) {
    links_doc.push_back({{"src", port_json(l.src)},
                         {"dst", port_json(l.dst)},
                         {"capacity", l.capacity_mbps},
                         {"tx_bytes", l.tx_bytes},
                         {"rate", l.rate_mbps}});
  }
  return {{"until", until_s},
          {"seed", seed},
          {"bin_width", bin_width_s},
          {"punts", punts},
          {"conservation", conservation_ok},
          {"flows", std::move(flows_doc)},
          {"queues", std::move(queues_doc)},
          {"links", std::move(links_doc)}};
}

std::string SimReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %10s %10s %8s %12s\n", "FLOW", "OFFERED", "ACHIEVED", "SENT",
                "DELIVERED", "DROPPED", "IN_FLIGHT");
  out << line;
  for (const FlowReport& f : flows) {
    std::snprintf(line, sizeof line, "%-16s %10.3f %10.3f %10llu %10llu %8llu %12llu\n", f.flow.flow_id.c_str(),
                  f.flow.offered_rate_mbps, f.achieved_rate_mbps, static_cast<unsigned long long>(f.sent),
                  static_cast<unsigned long long>(f.delivered), static_cast<unsigned long long>(f.dropped),
                  static_cast<unsigned long long>(f.in_flight));
    out << line;
    if (f.error) out << "  error: " << *f.error << "\n";
  }
  if (!queues.empty()) {
    std::snprintf(line, sizeof line, "%-22s %5s %6s %10s %10s %12s\n", "QUEUE DEVICE", "PORT", "QID", "ENQUEUED",
                  "DEQUEUED", "SHAPED_DROPS");
    out << line;
    for (const QueueReport& q : queues) {
      std::snprintf(line, sizeof line, "%-22s %5u %6u %10llu %10llu %12llu\n", q.device.to_string().c_str(), q.port,
                    q.queue_id, static_cast<unsigned long long>(q.enqueued),
                    static_cast<unsigned long long>(q.dequeued), static_cast<unsigned long long>(q.shaped_drops));
      out << line;
    }
  }
  std::snprintf(line, sizeof line, "punts=%llu conservation=%s\n", static_cast<unsigned long long>(punts),
                conservation_ok ? "ok" : "VIOLATED");
  out << line;
  return out.str();
}

// --- flow documents -----------------------------------------------------------

Result<TrafficFlow> parse_flow_document(const json& doc) {
  try {
    if (!doc.is_object()) return Error{Errc::kInvalidArgument, "flow must be an object"};
    TrafficFlow f;
    f.flow_id = doc.at("id").get<std::string>();
    auto src = HostId::parse(doc.at("src").get<std::string>());
    if (!src.ok()) return src.error();
    auto dst = HostId::parse(doc.at("dst").get<std::string>());
    if (!dst.ok()) return dst.error();
    f.src_host = *src;
    f.dst_host = *dst;
    f.offered_rate_mbps = doc.at("rate").get<double>();
    f.packet_size = doc.value("packet_size", kDefaultPacketSize);
    f.start_s = doc.value("start", 0.0);
    f.stop_s = doc.at("stop").get<double>();
    const std::string encap = doc.value("encapsulation", std::string("PLAIN"));
    if (encap == "GTPU") {
      f.gtpu_teid = doc.at("teid").get<std::uint32_t>();
    } else if (encap != "PLAIN") {
      return Error{Errc::kInvalidArgument, "encapsulation must be PLAIN or GTPU"};
    }
    return f;
  } catch (const json::exception& e) {
    return Error{Errc::kInvalidArgument, std::string("bad flow: ") + e.what()};
  }
}

json flow_document(const TrafficFlow& f) {
  json doc = {{"id", f.flow_id},
              {"src", f.src_host.to_string()},
              {"dst", f.dst_host.to_string()},
              {"rate", f.offered_rate_mbps},
              {"packet_size", f.packet_size},
              {"start", f.start_s},
              {"stop", f.stop_s},
              {"encapsulation", f.gtpu_teid ? "GTPU" : "PLAIN"}};
  if (f.gtpu_teid) doc["teid"] = *f.gtpu_teid;
  return doc;
}

}  // namespace fhctl
