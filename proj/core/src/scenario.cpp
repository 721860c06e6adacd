#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "beamroam/error.hpp"
#include "beamroam/hash_random.hpp"
#include "beamroam/sim.hpp"

namespace beamroam {

namespace {

constexpr double kReportHz = 10.0;

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(ErrorCode::kValidationError, field, 0, field + ": " + what);
}

bool finite(double v) { return std::isfinite(v); }

struct Knot {
  double t;
  Vec3 p;
};

// Time-stamped polyline that walks vertices at a fixed speed.
class PathBuilder {
 public:
  PathBuilder(Vec3 start, double speed) : speed_(speed) { knots_.push_back({0.0, start}); }

  const Vec3& here() const { return knots_.back().p; }
  double now() const { return knots_.back().t; }

  void walk_to(const Vec3& p) {
    const double d = distance(here(), p);
    if (d <= 0.0) return;
    knots_.push_back({now() + d / speed_, p});
  }
  void hold_until(double t) {
    if (t > now()) knots_.push_back({t, here()});
  }

  MobilityTrace sample(double duration) const {
    const double end = std::max(duration, now());
    const auto n = static_cast<long>(std::ceil(end * kReportHz - 1e-9));
    std::vector<TracePoint> pts;
    pts.reserve(static_cast<std::size_t>(n) + 2);
    std::size_t k = 0;
    for (long i = 0; i <= std::max(n, 1L); ++i) {
      const double t = static_cast<double>(i) / kReportHz;
      while (k + 1 < knots_.size() && knots_[k + 1].t <= t) ++k;
      Vec3 p = knots_[k].p;
      if (k + 1 < knots_.size()) {
        const auto& a = knots_[k];
        const auto& b = knots_[k + 1];
        p = a.p + (b.p - a.p) * ((t - a.t) / (b.t - a.t));
      }
      pts.push_back({t, p});
    }
    return MobilityTrace(std::move(pts));
  }

 private:
  double speed_;
  std::vector<Knot> knots_;
};

double fov_radius(const ApLayout& layout, double ceiling, double height, double beamwidth_deg) {
  const double half = std::min(beamwidth_deg, 170.0) * 0.5 * std::numbers::pi / 180.0;
  double r = 0.9 * (ceiling - height) * std::tan(half);
  double nearest = std::numeric_limits<double>::infinity();
  const auto& aps = layout.aps();
  for (std::size_t i = 0; i < aps.size(); ++i) {
    for (std::size_t j = i + 1; j < aps.size(); ++j) {
      nearest = std::min(nearest, distance(floor_projection(aps[i].position), floor_projection(aps[j].position)));
    }
  }
  if (std::isfinite(nearest)) r = std::min(r, 0.45 * nearest);
  return std::max(r, 0.1);
}

// Random walk of exactly length metres between uniform targets in a floor
// disc, then back to the centre; returns the tour start time, which is the
// same for every seed.
double add_warmup(PathBuilder& path, const Vec3& centre, double radius, double length, double speed,
                  std::uint64_t seed) {
  std::uint64_t draw = 0;
  auto target = [&] {
    for (;;) {
      const double x = (2.0 * uniform01(hash_key(seed, ++draw)) - 1.0) * radius;
      const double y = (2.0 * uniform01(hash_key(seed, ++draw)) - 1.0) * radius;
      if (x * x + y * y <= radius * radius) return Vec3{centre.x + x, centre.y + y, centre.z};
    }
  };
  double left = length;
  while (left > 1e-12) {
    const Vec3 goal = target();
    const double d = distance(path.here(), goal);
    if (d < 1e-9) continue;
    if (d <= left) {
      path.walk_to(goal);
      left -= d;
    } else {
      path.walk_to(path.here() + (goal - path.here()) * (left / d));
      left = 0.0;
    }
  }
  path.walk_to(centre);
  const double start = length > 0.0 ? (length + radius) / speed : 0.0;
  path.hold_until(start);
  return start;
}

Vec3 at_height(const Vec3& p, double h) { return {p.x, p.y, h}; }

}  // namespace

std::string to_string(RadioMode m) { return m == RadioMode::kDirf ? "dirf" : "omrf"; }
std::string to_string(Transport t) { return t == Transport::kTcp ? "tcp" : "udp"; }
std::string to_string(TraceKind k) {
  switch (k) {
    case TraceKind::kTour: return "tour";
    case TraceKind::kStraight: return "straight";
    case TraceKind::kRandomWaypoint: return "random_waypoint";
    case TraceKind::kStatic: return "static";
    case TraceKind::kWaypoints: return "waypoints";
    case TraceKind::kFile: return "file";
  }
  return "tour";
}
std::string to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::kRelative: return "relative";
    case SelectorKind::kLiteral: return "literal";
    case SelectorKind::kGreedySnr: return "greedy_snr";
  }
  return "relative";
}

void Scenario::validate() const {
  check(duration_s > 0.0 && finite(duration_s), "duration_s", "must be positive");
  check(room.x_max > room.x_min && room.y_max > room.y_min, "room", "bounds are empty");
  check(room.ceiling_m > 0.0 && finite(room.ceiling_m), "room.ceiling_m", "must be positive");
  if (layout.grid) {
    check(layout.count == 1 || (layout.count >= 2 && layout.count % 2 == 0), "layout.count",
          "grid layouts need 1 AP or an even count");
    check(layout.count <= 64, "layout.count", "at most 64 APs");
  } else {
    check(!layout.aps.empty(), "layout.aps", "explicit layout needs at least one AP");
  }
  try {
    antenna.validate();
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "antenna", 0, std::string("antenna: ") + e.what());
  }
  try {
    channel.validate();
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "channel", 0, std::string("channel: ") + e.what());
  }
  try {
    loss.validate();
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "loss", 0, std::string("loss: ") + e.what());
  }
  check(!clients.empty(), "clients", "at least one client is required");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto& t = clients[i].trace;
    const std::string f = "clients[" + std::to_string(i) + "].trace.";
    check(t.speed_mps > 0.0 && t.speed_mps <= MobilityTrace::kDefaultMaxSpeed, f + "speed_mps",
          "must lie in (0, 3] m/s");
    check(t.warmup_m >= 0.0 && finite(t.warmup_m), f + "warmup_m", "must be non-negative");
    check(t.height_m >= 0.0 && t.height_m < room.ceiling_m, f + "height_m", "must lie below the ceiling");
    check(is_finite(t.start) && finite(t.heading_deg), f + "start", "must be finite");
    if (t.kind == TraceKind::kWaypoints) check(!t.waypoints.empty(), f + "waypoints", "needs at least one point");
    if (t.kind == TraceKind::kFile) check(!t.points.empty(), f + "file", "trace file has no samples");
  }
  check(workload.packet_bytes > 0.0 && finite(workload.packet_bytes), "workload.packet_bytes", "must be positive");
  check(workload.duration_s <= duration_s && finite(workload.duration_s), "workload.duration_s",
        "must not exceed duration_s");
  check(selector.direction_window_s > 0.0, "selector.direction_window_s", "must be positive");
  check(selector.lookahead_m > 0.0 && finite(selector.lookahead_m), "selector.lookahead_m", "must be positive");
  try {
    estimator.validate();
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "estimator", 0, std::string("estimator: ") + e.what());
  }
  try {
    scheduler.validate();
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "scheduler", 0, std::string("scheduler: ") + e.what());
  }
  check(network.switch_latency_s >= 0.0, "network.switch_latency_s", "must be non-negative");
  check(network.rto_s > 0.0, "network.rto_s", "must be positive");
  check(network.wired_delay_s >= 0.0 && network.controller_delay_s >= 0.0, "network.wired_delay_s",
        "delays must be non-negative");
  check(network.max_window_pkts >= 1.0, "network.max_window_pkts", "must be at least 1");
  check(network.initial_window_pkts >= 1.0 && network.initial_window_pkts <= network.max_window_pkts,
        "network.initial_window_pkts", "must lie in [1, max_window_pkts]");
  check(network.report_interval_s > 0.0, "network.report_interval_s", "must be positive");
  check(network.mac_overhead >= 0.0 && network.mac_overhead < 1.0, "network.mac_overhead", "must lie in [0, 1)");
  try {
    (void)directional_layout(*this);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::kValidationError, "layout", 0, std::string("layout: ") + e.what());
  }
}

ApLayout directional_layout(const Scenario& s) {
  if (!s.layout.grid) return ApLayout(s.layout.aps);
  std::vector<ApDescriptor> aps;
  const int rows = s.layout.count == 1 ? 1 : 2;
  const int cols = s.layout.count / rows;
  const double w = (s.room.x_max - s.room.x_min) / cols;
  const double h = (s.room.y_max - s.room.y_min) / rows;
  // Column-major ids: AP_{2k} on the first row, AP_{2k+1} on the second.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      ApDescriptor ap;
      ap.id = static_cast<int>(aps.size());
      ap.position = {s.room.x_min + (c + 0.5) * w, s.room.y_min + (r + 0.5) * h, s.room.ceiling_m};
      ap.beamwidth_deg = s.antenna.beamwidth_deg;
      ap.boresight_gain_db = s.antenna.boresight_gain_db;
      aps.push_back(ap);
    }
  }
  return ApLayout(aps);
}

ApLayout active_layout(const Scenario& s) {
  if (s.mode == RadioMode::kDirf) return directional_layout(s);
  ApDescriptor ap;
  ap.position = {(s.room.x_min + s.room.x_max) * 0.5, (s.room.y_min + s.room.y_max) * 0.5, s.room.ceiling_m};
  ap.beamwidth_deg = 180.0;
  ap.boresight_gain_db = 0.0;
  return ApLayout({ap});
}

ChannelParams scenario_channel(const Scenario& s) {
  ChannelParams c = s.channel;
  c.seed = hash_key(s.seed, 0x6368616eULL);
  return c;
}

AntennaPattern active_pattern(const Scenario& s) {
  return s.mode == RadioMode::kDirf ? s.antenna : AntennaPattern::omni();
}

std::vector<int> tour_order(const ApLayout& layout) {
  const int n = static_cast<int>(layout.size());
  std::vector<int> order;
  if (n == 1) return {0};
  for (int i = 0; i < n; i += 2) order.push_back(i);
  for (int i = n - 1 - (n % 2 == 0 ? 0 : 1); i >= 1; i -= 2) order.push_back(i);
  return order;
}

MobilityTrace generate_trace(const TraceSpec& spec, const ApLayout& layout, const RoomBounds& room,
                             double beamwidth_deg, std::uint64_t seed, double duration, std::size_t client_index) {
  if (!(spec.speed_mps > 0.0)) throw Error(ErrorCode::kZeroSpeed, "trace speed must be positive");
  const double v = spec.speed_mps;
  const double h = spec.height_m;
  const std::uint64_t key = hash_key(seed, 0x7472616365ULL, client_index);

  switch (spec.kind) {
    case TraceKind::kStatic: {
      PathBuilder path(at_height(spec.start, h), v);
      return path.sample(duration);
    }
    case TraceKind::kStraight: {
      const double a = spec.heading_deg * std::numbers::pi / 180.0;
      PathBuilder path(at_height(spec.start, h), v);
      path.walk_to(at_height(spec.start, h) + Vec3{std::cos(a), std::sin(a), 0.0} * (v * duration));
      return path.sample(duration);
    }
    case TraceKind::kRandomWaypoint: {
      const double margin = 0.5;
      auto target = [&, draw = std::uint64_t{0}]() mutable {
        const double x = room.x_min + margin + uniform01(hash_key(key, ++draw)) * (room.x_max - room.x_min - 2 * margin);
        const double y = room.y_min + margin + uniform01(hash_key(key, ++draw)) * (room.y_max - room.y_min - 2 * margin);
        return Vec3{x, y, h};
      };
      PathBuilder path(target(), v);
      while (path.now() < duration) path.walk_to(target());
      return path.sample(duration);
    }
    case TraceKind::kFile: {
      std::vector<TracePoint> pts = spec.points;
      if (pts.back().t < duration) pts.push_back({duration, pts.back().position});
      return MobilityTrace(std::move(pts));
    }
    case TraceKind::kTour:
    case TraceKind::kWaypoints: {
      std::vector<Vec3> stops;
      if (spec.kind == TraceKind::kTour) {
        const auto order = tour_order(layout);
        const std::size_t n = order.size();
        const std::size_t off = spec.start_offset >= 0 ? static_cast<std::size_t>(spec.start_offset) : client_index;
        for (std::size_t i = 0; i < n; ++i) {
          stops.push_back(at_height(layout.ap(order[(off + i) % n]).position, h));
        }
      } else {
        for (const auto& p : spec.waypoints) stops.push_back(at_height(p, h));
      }
      const double radius = fov_radius(layout, room.ceiling_m, h, beamwidth_deg);
      PathBuilder path(stops.front(), v);
      add_warmup(path, stops.front(), radius, spec.warmup_m, v, key);
      if (stops.size() > 1) {
        std::size_t i = 1;
        for (;;) {
          path.walk_to(stops[i % stops.size()]);
          ++i;
          if (!spec.cyclic && i == stops.size()) break;
          if (spec.cyclic && path.now() >= duration) break;
        }
      }
      return path.sample(duration);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown trace kind");
}

double warmup_end_time(const Scenario& s, std::size_t client_index) {
  const auto& t = s.clients.at(client_index).trace;
  if ((t.kind != TraceKind::kTour && t.kind != TraceKind::kWaypoints) || !(t.warmup_m > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const double radius = fov_radius(directional_layout(s), s.room.ceiling_m, t.height_m, s.antenna.beamwidth_deg);
  return (t.warmup_m + radius) / t.speed_mps;
}

MobilityTrace generate_trace(const Scenario& s, std::size_t client_index) {
  return generate_trace(s.clients.at(client_index).trace, directional_layout(s), s.room, s.antenna.beamwidth_deg,
                        s.seed, s.duration_s, client_index);
}

}  // namespace beamroam
