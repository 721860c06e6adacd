#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamroam/estimator.hpp"
#include "beamroam/geometry.hpp"
#include "beamroam/radio.hpp"
#include "beamroam/scheduler.hpp"
#include "beamroam/selector.hpp"

namespace beamroam {

enum class RadioMode { kDirf, kOmrf };
enum class Transport { kTcp, kUdp };
enum class TraceKind { kTour, kStraight, kRandomWaypoint, kStatic, kWaypoints, kFile };
enum class SelectorKind { kRelative, kLiteral, kGreedySnr };

/// Floor rectangle and ceiling height of the room, metres.
struct RoomBounds {
  double x_min = -2.5;
  double x_max = 12.5;
  double y_min = -2.5;
  double y_max = 7.5;
  double ceiling_m = 3.0;

  bool operator==(const RoomBounds&) const = default;
};

struct LayoutSpec {
  // "grid": two rows of count/2 APs spread evenly over the room (one AP for
  // count 1). "explicit": the aps list as given.
  bool grid = true;
  int count = 6;
  std::vector<ApDescriptor> aps;

  bool operator==(const LayoutSpec&) const = default;
};

struct TraceSpec {
  TraceKind kind = TraceKind::kTour;
  double speed_mps = 1.4;
  // Random walk under the first AP before a tour or waypoint walk starts.
  double warmup_m = 15.0;
  double height_m = 1.0;
  // Tour cell to start from; negative means the client index.
  int start_offset = -1;
  bool cyclic = false;
  Vec3 start;
  double heading_deg = 0.0;
  std::vector<Vec3> waypoints;
  std::string file;
  std::vector<TracePoint> points;  // file contents, loaded with the scenario

  bool operator==(const TraceSpec&) const = default;
};

struct ClientSpec {
  TraceSpec trace;

  bool operator==(const ClientSpec&) const = default;
};

struct Workload {
  Transport transport = Transport::kTcp;
  double packet_bytes = 1460.0;
  // Traffic stops after this many seconds; negative means the scenario
  // duration.
  double duration_s = -1.0;

  bool operator==(const Workload&) const = default;
};

struct SelectorSpec {
  SelectorKind kind = SelectorKind::kRelative;
  double direction_window_s = 1.0;
  double lookahead_m = 2.5;
  bool exact_estimation = false;

  bool operator==(const SelectorSpec&) const = default;
};

struct NetworkParams {
  double switch_latency_s = 0.030;
  double rto_s = 0.200;
  double wired_delay_s = 0.005;
  double controller_delay_s = 0.0005;
  double max_window_pkts = 200.0;
  double initial_window_pkts = 10.0;
  double report_interval_s = 0.1;
  double mac_overhead = 0.1;

  bool operator==(const NetworkParams&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration_s = 30.0;
  RadioMode mode = RadioMode::kDirf;
  Bandwidth bandwidth = Bandwidth::k20MHz;
  RoomBounds room;
  LayoutSpec layout;
  AntennaPattern antenna;
  ChannelParams channel;  // channel.seed is derived from seed at run time
  LossModel loss;
  std::vector<ClientSpec> clients{ClientSpec{}};
  Workload workload;
  SelectorSpec selector;
  EstimatorConfig estimator;
  SnrScale snr_scale = SnrScale::kLinear;
  SchedulerConfig scheduler;
  NetworkParams network;
  bool packet_trace = false;

  /// Throws ConfigError (kValidationError) naming the offending field.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// The directional layout the scenario describes (ignores mode).
ApLayout directional_layout(const Scenario& s);
/// The layout actually simulated: the directional one, or a single omni AP
/// at the room centre in omrf mode.
ApLayout active_layout(const Scenario& s);
AntennaPattern active_pattern(const Scenario& s);
/// Channel parameters with the shadowing seed derived from the scenario seed.
ChannelParams scenario_channel(const Scenario& s);

/// Cells of a two-row grid layout in tour order: along the first row, back
/// along the second.
std::vector<int> tour_order(const ApLayout& layout);

/// 10 Hz trace for one client of a scenario.
MobilityTrace generate_trace(const Scenario& s, std::size_t client_index);
/// Lower-level generator: spec walked over layout for duration seconds.
MobilityTrace generate_trace(const TraceSpec& spec, const ApLayout& layout, const RoomBounds& room,
                             double beamwidth_deg, std::uint64_t seed, double duration, std::size_t client_index);

/// End of the warm-up walk of a tour or waypoint client; infinity for trace
/// kinds without one.
double warmup_end_time(const Scenario& s, std::size_t client_index);

struct HandoffRecord {
  double t = 0.0;
  int client = 0;
  int from_ap = 0;
  int to_ap = 0;
  double latency_s = -1.0;  // negative until the first packet arrives via to_ap
  double buffered_bits = 0.0;   // this client's packets flushed from from_ap
  double ap_buffer_bits = 0.0;  // everything from_ap held (queue and the packet on air)
};

struct PacketTraceRow {
  double t = 0.0;
  std::string event;
  int client = 0;
  int ap = -1;
  std::uint64_t uid = 0;
  std::uint64_t seq = 0;
  bool marked = false;
};

struct ClientMetrics {
  int client = 0;
  double mean_tput_mbps = 0.0;
  double median_tput_mbps = 0.0;
  std::vector<double> tput_cdf_mbps;  // sorted 1 s bins
  std::uint64_t handoffs = 0;
  double mean_handoff_latency_s = 0.0;
  std::uint64_t retransmissions = 0;
  std::uint64_t handoff_retransmissions = 0;
  double buffered_bits_at_handoff = 0.0;
  double est_error_m = 0.0;        // NaN when the estimator never ran
  double selection_accuracy = 0.0; // NaN without crossings
  std::uint64_t crossings = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost_channel = 0;
  std::uint64_t dropped_buffer = 0;
  std::uint64_t in_flight_end = 0;
  std::uint64_t ecn_marks = 0;
};

struct MetricsReport {
  std::string scenario;
  std::uint64_t seed = 0;
  RadioMode mode = RadioMode::kDirf;
  double duration_s = 0.0;
  std::vector<ClientMetrics> clients;
  std::vector<HandoffRecord> handoffs;
  std::vector<PacketTraceRow> packets;
  double max_buffer_bits = 0.0;

  double mean_client_tput_mbps() const;
  std::uint64_t total_handoffs() const;
};

/// Deterministic given the scenario (seed included).
MetricsReport run(const Scenario& scenario);

struct CompareReport {
  std::vector<std::uint64_t> seeds;
  double dirf_mean_tput_mbps = 0.0;
  double omrf_mean_tput_mbps = 0.0;
  double ratio = 0.0;
  // metric name -> (dirf - omrf), averaged over seeds
  std::vector<std::pair<std::string, double>> deltas;
};

/// Runs both scenarios over the same seeds (the dirf scenario's seed when
/// seeds is empty). Throws kMismatchedScenarios unless the two differ only
/// in mode and name.
CompareReport compare(const Scenario& dirf, const Scenario& omrf, const std::vector<std::uint64_t>& seeds = {});

std::string to_string(RadioMode m);
std::string to_string(Transport t);
std::string to_string(TraceKind k);
std::string to_string(SelectorKind k);

}  // namespace beamroam
