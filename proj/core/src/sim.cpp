#include "beamroam/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>

#include "beamroam/error.hpp"
#include "beamroam/hash_random.hpp"

namespace beamroam {

namespace {

enum class Ev : std::uint8_t {
  kReport,
  kArriveController,
  kArriveAp,
  kTxDone,
  kAck,
  kLossNotice,
  kHandoffDone,
};

struct Event {
  double t = 0.0;
  std::uint64_t seq = 0;
  Ev kind = Ev::kReport;
  int client = -1;
  int ap = -1;
  std::uint64_t uid = 0;
  std::uint64_t token = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

enum class Fate : std::uint8_t { kPending, kDelivered, kLost, kDropped };

struct Packet {
  int client = 0;
  std::uint64_t seq = 0;
  double send_time = 0.0;
  bool marked = false;
  bool handoff_drop = false;
  Fate fate = Fate::kPending;
};

struct Flow {
  double cwnd = 10.0;
  bool slow_start = true;
  double last_reduction = -std::numeric_limits<double>::infinity();
  std::uint64_t in_flight = 0;
  std::uint64_t next_seq = 0;
};

struct ClientState {
  MobilityTrace trace;
  std::optional<Selector> selector;
  int serving = 0;
  double handoff_done = 0.0;
  std::vector<Sample> samples;
  double sample_until = 0.0;
  Vec3 last_pos;
  FlowMarker marker;
  Flow flow;
  ClientMetrics m;
  std::vector<double> bin_bits;
  std::uint64_t correct = 0;
  long pending_latency = -1;
  double latency_sum = 0.0;
  std::uint64_t latency_count = 0;

  explicit ClientState(const SchedulerConfig& cfg) : marker(cfg) {}
};

struct ApState {
  ApBuffer buffer;
  bool busy = false;
  std::uint64_t token = 0;
  std::uint64_t tx_uid = 0;
  int tx_client = -1;
  double tx_snr = 0.0;
  bool tx_zero_rate = false;

  explicit ApState(double cap) : buffer(cap) {}
};

class Simulation {
 public:
  explicit Simulation(const Scenario& s)
      : s_(s),
        layout_(active_layout(s)),
        pattern_(active_pattern(s)),
        rates_(PhyRateTable::defaults()),
        packet_bits_(s.workload.packet_bytes * 8.0),
        workload_end_(s.workload.duration_s < 0.0 ? s.duration_s : s.workload.duration_s) {
    channel_ = scenario_channel(s);
    loss_key_ = hash_key(s.seed, 0x6c6f7373ULL);
    for (std::size_t i = 0; i < layout_.size(); ++i) aps_.emplace_back(s.scheduler.buffer_bits);

    SelectionConfig sel;
    sel.mode = s.selector.kind == SelectorKind::kLiteral ? SelectorMode::kLiteral : SelectorMode::kRelative;
    sel.direction_window_s = s.selector.direction_window_s;
    sel.lookahead_m = s.selector.lookahead_m;
    sel.exact_estimation = s.selector.exact_estimation;
    sel.estimator = s.estimator;
    sel_cfg_ = sel;

    const auto positions = layout_.positions();
    for (std::size_t c = 0; c < s.clients.size(); ++c) {
      SchedulerConfig sc = s.scheduler;
      sc.seed = hash_key(s.seed, 0x6d61726bULL, c);
      clients_.emplace_back(sc);
      auto& cl = clients_.back();
      cl.trace = generate_trace(s, c);
      cl.m.client = static_cast<int>(c);
      cl.last_pos = cl.trace.position_at(0.0);
      cl.sample_until = warmup_end_time(s, c);
      cl.serving = nearest_on_floor(positions, cl.last_pos);
      // UDP has no congestion control and keeps the full window in flight.
      cl.flow.cwnd = s.workload.transport == Transport::kUdp ? s.network.max_window_pkts : s.network.initial_window_pkts;
      cl.m.est_error_m = std::numeric_limits<double>::quiet_NaN();
      cl.m.selection_accuracy = std::numeric_limits<double>::quiet_NaN();
      if (s.selector.kind != SelectorKind::kGreedySnr) cl.selector.emplace(layout_, sel_cfg_, cl.serving);
      const auto bins = static_cast<std::size_t>(std::ceil(workload_end_ - 1e-12));
      cl.bin_bits.assign(bins, 0.0);
    }
  }

  MetricsReport run() {
    report_.scenario = s_.name;
    report_.seed = s_.seed;
    report_.mode = s_.mode;
    report_.duration_s = s_.duration_s;

    schedule({0.0, 0, Ev::kReport});
    for (std::size_t c = 0; c < clients_.size(); ++c) try_send(static_cast<int>(c), 0.0);

    while (!queue_.empty()) {
      const Event e = queue_.top();
      if (e.t > s_.duration_s) break;
      queue_.pop();
      dispatch(e);
    }
    finish();
    return std::move(report_);
  }

 private:
  void schedule(Event e) {
    e.seq = next_seq_++;
    queue_.push(e);
  }

  void trace_row(double t, const char* what, int client, int ap, std::uint64_t uid) {
    if (!s_.packet_trace) return;
    const Packet* p = uid < packets_.size() ? &packets_[uid] : nullptr;
    report_.packets.push_back({t, what, client, ap, uid, p ? p->seq : 0, p ? p->marked : false});
  }

  Vec3 pos(int c, double t) const {
    const auto& tr = clients_[static_cast<std::size_t>(c)].trace;
    return tr.position_at(std::min(t, tr.end_time()));
  }

  double snr(int ap, const Vec3& p) const { return snr_at(layout_.ap(ap), pattern_, channel_, p); }

  bool reachable(int c, int ap, double now) const {
    const auto& cl = clients_[static_cast<std::size_t>(c)];
    return cl.serving == ap && now >= cl.handoff_done;
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case Ev::kReport: on_report(e.t); break;
      case Ev::kArriveController: on_controller(e); break;
      case Ev::kArriveAp: on_arrive_ap(e); break;
      case Ev::kTxDone: on_tx_done(e); break;
      case Ev::kAck: on_ack(e); break;
      case Ev::kLossNotice: on_loss_notice(e); break;
      case Ev::kHandoffDone: kick(clients_[static_cast<std::size_t>(e.client)].serving, e.t); break;
    }
  }

  // Position reports drive selection, estimation samples, and alpha.
  void on_report(double t) {
    const double dt = s_.network.report_interval_s;
    for (std::size_t i = 0; i < clients_.size(); ++i) report_client(static_cast<int>(i), t, dt);
    const double next = std::round(t / dt + 1.0) * dt;
    if (next <= s_.duration_s + 1e-12) schedule({next, 0, Ev::kReport});
  }

  void report_client(int c, double t, double dt) {
    auto& cl = clients_[static_cast<std::size_t>(c)];
    const Vec3 prev = cl.last_pos;
    const Vec3 cur = pos(c, t);
    cl.last_pos = cur;
    const Vec3 velocity = t > 0.0 ? (cur - prev) / dt : Vec3{};

    if (cl.selector) {
      if (!cl.selector->anchored() && layout_.size() > 1 && t <= cl.sample_until + 1e-9) {
        const double db = snr(cl.serving, cur);
        const double r = s_.snr_scale == SnrScale::kLinear ? std::pow(10.0, db / 10.0) : db;
        cl.samples.push_back({r, cur});
      }
      if (t > 0.0) {
        if (const auto hit = cl.selector->crossed(prev, cur)) {
          if (!cl.selector->anchored()) anchor(cl);
          Vec3 dir = prev == cur ? Vec3{} : cur - prev;
          const double t0 = std::max(cl.trace.start_time(), t - s_.selector.direction_window_s);
          if (t - t0 >= 1e-6) {
            const Vec3 w = moving_direction(cl.trace, t0, t);
            if (squared_norm(w) > 0.0) dir = w;
          }
          const auto rec = cl.selector->decide(t, *hit, dir, cur);
          ++cl.m.crossings;
          if (rec.selected == rec.truth) ++cl.correct;
          if (rec.selected != rec.from_ap) start_handoff(c, rec.selected, t);
        }
      }
    } else if (t > 0.0) {
      int best = cl.serving;
      double best_snr = snr(cl.serving, cur);
      for (const auto& ap : layout_.aps()) {
        const double v = snr(ap.id, cur);
        if (v > best_snr) {
          best_snr = v;
          best = ap.id;
        }
      }
      if (best != cl.serving) start_handoff(c, best, t);
    }

    const auto lines = cl.selector ? cl.selector->lines() : switch_lines_for(layout_, cl.serving);
    const double p = loss_prob(snr(cl.serving, cur), norm(floor_projection(velocity)), s_.loss);
    cl.marker.update(lines, cur, velocity, p);
  }

  void anchor(ClientState& cl) {
    const Vec3 truth = layout_.ap(cl.serving).position;
    Vec3 est = truth;
    if (!s_.selector.exact_estimation) {
      try {
        est = estimate_ap_position(SampleSet(cl.samples), s_.estimator).position;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInsufficientSamples) throw;
        // Too little motion to rank: fall back to the estimator's own start
        // point, the sample centroid at ceiling height.
        Vec3 c;
        for (const auto& smp : cl.samples) c += smp.q * (1.0 / static_cast<double>(std::max<std::size_t>(1, cl.samples.size())));
        if (cl.samples.empty()) c = cl.last_pos;
        est = {c.x, c.y, s_.estimator.ceiling_height_m};
      }
    }
    cl.selector->anchor_from(est);
    cl.m.est_error_m = distance(est, truth);
    cl.samples.clear();
    cl.samples.shrink_to_fit();
  }

  void start_handoff(int c, int to, double t) {
    auto& cl = clients_[static_cast<std::size_t>(c)];
    const int from = cl.serving;
    cl.serving = to;
    cl.handoff_done = t + s_.network.switch_latency_s;
    ++cl.m.handoffs;

    HandoffRecord rec{t, c, from, to, -1.0, 0.0, 0.0};
    auto& ap = aps_[static_cast<std::size_t>(from)];
    rec.ap_buffer_bits = ap.buffer.occupancy_bits() + (ap.busy ? packet_bits_ : 0.0);
    std::vector<std::uint64_t> flushed;
    if (ap.busy && ap.tx_client == c) {
      ap.busy = false;
      ++ap.token;
      flushed.push_back(ap.tx_uid);
    }
    for (const auto& p : ap.buffer.drain_client(c)) flushed.push_back(p.id);
    for (auto uid : flushed) {
      rec.buffered_bits += packet_bits_;
      packets_[uid].handoff_drop = true;
      drop(uid, t, from);
    }
    cl.m.buffered_bits_at_handoff += rec.buffered_bits;
    cl.pending_latency = static_cast<long>(report_.handoffs.size());
    report_.handoffs.push_back(rec);
    trace_row(t, "handoff", c, to, 0);
    schedule({cl.handoff_done, 0, Ev::kHandoffDone, c});
    kick(from, t);
  }

  void try_send(int c, double now) {
    auto& cl = clients_[static_cast<std::size_t>(c)];
    while (now < workload_end_ && static_cast<double>(cl.flow.in_flight) < std::floor(cl.flow.cwnd)) {
      send(c, now, cl.flow.next_seq++, false);
    }
  }

  void send(int c, double now, std::uint64_t seq, bool retx) {
    auto& cl = clients_[static_cast<std::size_t>(c)];
    const std::uint64_t uid = packets_.size();
    packets_.push_back({c, seq, now});
    ++cl.m.sent;
    ++cl.flow.in_flight;
    if (retx) ++cl.m.retransmissions;
    trace_row(now, retx ? "retransmit" : "send", c, -1, uid);
    schedule({now + s_.network.wired_delay_s, 0, Ev::kArriveController, c, -1, uid});
  }

  void on_controller(const Event& e) {
    auto& cl = clients_[static_cast<std::size_t>(e.client)];
    auto& pkt = packets_[e.uid];
    if (s_.workload.transport == Transport::kTcp) pkt.marked = cl.marker.next();
    if (pkt.marked) ++cl.m.ecn_marks;
    schedule({e.t + s_.network.controller_delay_s, 0, Ev::kArriveAp, e.client, cl.serving, e.uid});
  }

  void on_arrive_ap(const Event& e) {
    auto& ap = aps_[static_cast<std::size_t>(e.ap)];
    if (clients_[static_cast<std::size_t>(e.client)].serving != e.ap) {
      packets_[e.uid].handoff_drop = true;
      drop(e.uid, e.t, e.ap);
      return;
    }
    if (!ap.buffer.push({e.uid, packet_bits_, e.t, e.client})) {
      drop(e.uid, e.t, e.ap);
      return;
    }
    report_.max_buffer_bits = std::max(report_.max_buffer_bits, ap.buffer.occupancy_bits());
    kick(e.ap, e.t);
  }

  void kick(int ap_id, double now) {
    auto& ap = aps_[static_cast<std::size_t>(ap_id)];
    if (ap.busy) return;
    const auto next = ap.buffer.pop_first_if([&](const BufferedPacket& p) { return reachable(p.client, ap_id, now); });
    if (!next) return;

    bool shared = false;
    for (const auto& p : ap.buffer.packets()) {
      if (p.client != next->client) {
        shared = true;
        break;
      }
    }
    const Vec3 where = pos(next->client, now);
    const double snr_db = snr(ap_id, where);
    double rate = phy_rate(rates_, snr_db, s_.bandwidth);
    ap.tx_zero_rate = rate <= 0.0;
    if (ap.tx_zero_rate) rate = rates_.steps(s_.bandwidth).front().rate_mbps;
    const double efficiency = shared ? 1.0 - s_.network.mac_overhead : 1.0;
    const double airtime = packet_bits_ / (rate * 1e6 * efficiency);

    ap.busy = true;
    ++ap.token;
    ap.tx_uid = next->id;
    ap.tx_client = next->client;
    ap.tx_snr = snr_db;
    schedule({now + airtime, 0, Ev::kTxDone, next->client, ap_id, next->id, ap.token});
  }

  void on_tx_done(const Event& e) {
    auto& ap = aps_[static_cast<std::size_t>(e.ap)];
    if (!ap.busy || e.token != ap.token) return;
    ap.busy = false;
    auto& cl = clients_[static_cast<std::size_t>(e.client)];
    const double speed = cl.trace.speed_at(std::min(e.t, cl.trace.end_time()));
    const double p = ap.tx_zero_rate ? 1.0 : loss_prob(ap.tx_snr, speed, s_.loss);
    if (p > 0.0 && uniform01(hash_key(loss_key_, e.uid)) < p) {
      packets_[e.uid].fate = Fate::kLost;
      ++cl.m.lost_channel;
      trace_row(e.t, "lost", e.client, e.ap, e.uid);
      // An isolated loss shows up as duplicate ACKs one return trip later.
      schedule({e.t + s_.network.wired_delay_s + s_.network.controller_delay_s, 0, Ev::kLossNotice, e.client, -1,
                e.uid});
    } else {
      deliver(e.client, e.ap, e.uid, e.t);
    }
    kick(e.ap, e.t);
  }

  void deliver(int c, int ap, std::uint64_t uid, double t) {
    auto& cl = clients_[static_cast<std::size_t>(c)];
    packets_[uid].fate = Fate::kDelivered;
    ++cl.m.delivered;
    if (t < workload_end_) {
      const auto bin = std::min(cl.bin_bits.size() - 1, static_cast<std::size_t>(std::floor(t)));
      cl.bin_bits[bin] += packet_bits_;
    }
    if (cl.pending_latency >= 0) {
      auto& rec = report_.handoffs[static_cast<std::size_t>(cl.pending_latency)];
      if (rec.to_ap == ap) {
        rec.latency_s = t - rec.t;
        cl.latency_sum += rec.latency_s;
        ++cl.latency_count;
        cl.pending_latency = -1;
      }
    }
    trace_row(t, "deliver", c, ap, uid);
    schedule({t + s_.network.wired_delay_s + s_.network.controller_delay_s, 0, Ev::kAck, c, ap, uid});
  }

  void drop(std::uint64_t uid, double t, int ap) {
    auto& pkt = packets_[uid];
    pkt.fate = Fate::kDropped;
    ++clients_[static_cast<std::size_t>(pkt.client)].m.dropped_buffer;
    trace_row(t, "drop", pkt.client, ap, uid);
    notify_loss(uid, t);
  }

  // Flushed bursts get no duplicate ACKs and wait for the retransmit timer.
  void notify_loss(std::uint64_t uid, double t) {
    const auto& pkt = packets_[uid];
    schedule({std::max(t, pkt.send_time + s_.network.rto_s), 0, Ev::kLossNotice, pkt.client, -1, uid});
  }

  void on_loss_notice(const Event& e) {
    auto& cl = clients_[static_cast<std::size_t>(e.client)];
    --cl.flow.in_flight;
    const auto& pkt = packets_[e.uid];
    if (s_.workload.transport == Transport::kTcp) {
      if (pkt.handoff_drop) ++cl.m.handoff_retransmissions;
      send(e.client, e.t, pkt.seq, true);
    }
    try_send(e.client, e.t);
  }

  void on_ack(const Event& e) {
    auto& cl = clients_[static_cast<std::size_t>(e.client)];
    --cl.flow.in_flight;
    if (s_.workload.transport == Transport::kTcp) {
      auto& f = cl.flow;
      const auto& pkt = packets_[e.uid];
      if (pkt.marked) {
        if (pkt.send_time > f.last_reduction) {
          f.cwnd = std::max(1.0, f.cwnd * 0.5);
          f.last_reduction = e.t;
          f.slow_start = false;
        }
      } else {
        f.cwnd += f.slow_start ? 1.0 : 1.0 / f.cwnd;
        f.cwnd = std::min(f.cwnd, s_.network.max_window_pkts);
      }
    }
    try_send(e.client, e.t);
  }

  void finish() {
    for (auto& cl : clients_) {
      auto& m = cl.m;
      m.in_flight_end = m.sent - m.delivered - m.lost_channel - m.dropped_buffer;
      if (workload_end_ > 0.0) {
        double total = 0.0;
        for (std::size_t i = 0; i < cl.bin_bits.size(); ++i) {
          total += cl.bin_bits[i];
          const double width = std::min(1.0, workload_end_ - static_cast<double>(i));
          m.tput_cdf_mbps.push_back(cl.bin_bits[i] / width / 1e6);
        }
        m.mean_tput_mbps = total / workload_end_ / 1e6;
        std::sort(m.tput_cdf_mbps.begin(), m.tput_cdf_mbps.end());
        const auto n = m.tput_cdf_mbps.size();
        m.median_tput_mbps =
            n % 2 == 1 ? m.tput_cdf_mbps[n / 2] : 0.5 * (m.tput_cdf_mbps[n / 2 - 1] + m.tput_cdf_mbps[n / 2]);
      }
      m.mean_handoff_latency_s = cl.latency_count > 0 ? cl.latency_sum / static_cast<double>(cl.latency_count) : 0.0;
      if (m.crossings > 0) m.selection_accuracy = static_cast<double>(cl.correct) / static_cast<double>(m.crossings);
      report_.clients.push_back(m);
    }
  }

  const Scenario& s_;
  ApLayout layout_;
  AntennaPattern pattern_;
  PhyRateTable rates_;
  ChannelParams channel_;
  SelectionConfig sel_cfg_;
  double packet_bits_;
  double workload_end_;
  std::uint64_t loss_key_ = 0;
  std::vector<ApState> aps_;
  std::vector<ClientState> clients_;
  std::vector<Packet> packets_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  MetricsReport report_;
};

}  // namespace

double MetricsReport::mean_client_tput_mbps() const {
  if (clients.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : clients) sum += c.mean_tput_mbps;
  return sum / static_cast<double>(clients.size());
}

std::uint64_t MetricsReport::total_handoffs() const {
  std::uint64_t n = 0;
  for (const auto& c : clients) n += c.handoffs;
  return n;
}

MetricsReport run(const Scenario& scenario) {
  scenario.validate();
  Simulation sim(scenario);
  return sim.run();
}

}  // namespace beamroam
