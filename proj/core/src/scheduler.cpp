#include "beamroam/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beamroam/error.hpp"
#include "beamroam/hash_random.hpp"

namespace beamroam {

void SchedulerConfig::validate() const {
  if (!(mss_bits > 0.0) || !(rtt_s > 0.0) || !(buffer_bits > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scheduler MSS, RTT and buffer size must be positive");
  }
  if (!(safety_factor > 0.0 && safety_factor <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scheduler safety_factor must lie in (0, 1]");
  }
}

double time_to_switch(double dist_to_line, double speed) {
  if (!(speed > 0.0)) throw Error(ErrorCode::kZeroSpeed, "time to switch needs a positive speed");
  if (!(dist_to_line >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "distance to the switch line is negative");
  return dist_to_line / speed;
}

double marking_rate_raw(double delta_t, const SchedulerConfig& cfg, double loss_p) {
  const double x = cfg.mss_bits * delta_t / (cfg.buffer_bits * cfg.rtt_s);
  return cfg.safety_factor * (2.0 * x * x - loss_p);
}

double marking_rate(double delta_t, const SchedulerConfig& cfg, double loss_p) {
  if (!(delta_t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta_t must be non-negative");
  return std::clamp(marking_rate_raw(delta_t, cfg, loss_p), 0.0, 1.0);
}

double throughput_model(double p, double alpha, const SchedulerConfig& cfg) {
  const double s = p + alpha;
  if (s == 0.0) throw Error(ErrorCode::kZeroDenominator, "p + alpha is zero");
  if (!(s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "p + alpha must be positive");
  return std::sqrt(2.0 / s) * cfg.mss_bits / cfg.rtt_s;
}

bool should_mark(std::uint64_t packet_index, double alpha, MarkingMode mode, std::uint64_t seed) {
  if (alpha <= 0.0) return false;
  if (alpha >= 1.0) return true;
  if (mode == MarkingMode::kSeededRandom) return uniform01(hash_key(seed, packet_index)) < alpha;
  if (packet_index == 0) return false;
  const double i = static_cast<double>(packet_index);
  return std::floor(i * alpha) > std::floor((i - 1.0) * alpha);
}

ApBuffer::ApBuffer(double capacity_bits) : capacity_(capacity_bits) {
  if (!(capacity_bits > 0.0)) throw Error(ErrorCode::kInvalidArgument, "buffer capacity must be positive");
}

bool ApBuffer::push(const BufferedPacket& p) {
  if (occupancy_ + p.size_bits > capacity_) return false;
  queue_.push_back(p);
  occupancy_ += p.size_bits;
  return true;
}

std::optional<BufferedPacket> ApBuffer::pop_front() {
  return pop_first_if([](const BufferedPacket&) { return true; });
}

std::deque<BufferedPacket> ApBuffer::drain_client(int client) {
  std::deque<BufferedPacket> out;
  std::deque<BufferedPacket> keep;
  for (const auto& p : queue_) (p.client == client ? out : keep).push_back(p);
  queue_.swap(keep);
  occupancy_ = 0.0;
  for (const auto& p : queue_) occupancy_ += p.size_bits;
  return out;
}

double ApBuffer::client_bits(int client) const {
  double bits = 0.0;
  for (const auto& p : queue_) {
    if (p.client == client) bits += p.size_bits;
  }
  return bits;
}

void FlowMarker::update(std::span<const SwitchLine> lines, const Vec3& pos, const Vec3& velocity, double loss_p) {
  alpha_ = 0.0;
  if (!cfg_.enabled || lines.empty()) return;
  const SwitchLine* nearest = nullptr;
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& ln : lines) {
    const double d = std::abs(ln.signed_distance(pos));
    if (d < dist) {
      dist = d;
      nearest = &ln;
    }
  }
  const Vec3 v = floor_projection(velocity);
  const double speed = norm(v);
  if (!(speed > 0.0) || dot(v, nearest->normal) <= 0.0) return;
  const double d = std::max(0.0, -nearest->signed_distance(pos));
  alpha_ = marking_rate(time_to_switch(d, speed), cfg_, std::clamp(loss_p, 0.0, 1.0));
}

bool FlowMarker::next() {
  ++counter_;
  return should_mark(counter_, alpha_, cfg_.marking_mode, cfg_.seed);
}

}  // namespace beamroam
