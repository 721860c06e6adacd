#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "beamroam/geometry.hpp"

namespace beamroam {

enum class MarkingMode { kDeterministicStride, kSeededRandom };

struct SchedulerConfig {
  bool enabled = true;
  double mss_bits = 11680.0;
  double rtt_s = 0.100;
  double buffer_bits = 2.5e6;
  double safety_factor = 0.8;
  MarkingMode marking_mode = MarkingMode::kDeterministicStride;
  std::uint64_t seed = 1;

  void validate() const;

  bool operator==(const SchedulerConfig&) const = default;
};

/// Seconds until a client dist_to_line metres from the switch line gets
/// there at speed. Throws kZeroSpeed for speed <= 0.
double time_to_switch(double dist_to_line, double speed);

/// clamp(safety_factor * (2 (MSS dt / (b RTT))^2 - p), 0, 1).
double marking_rate(double delta_t, const SchedulerConfig& cfg, double loss_p);

/// Pre-clamp value of marking_rate with safety_factor applied.
double marking_rate_raw(double delta_t, const SchedulerConfig& cfg, double loss_p);

/// sqrt(2 / (p + alpha)) * MSS / RTT in bits/s. Throws kZeroDenominator when
/// p + alpha is 0.
double throughput_model(double p, double alpha, const SchedulerConfig& cfg);

/// Whether packet number packet_index (counted from 1) is marked.
bool should_mark(std::uint64_t packet_index, double alpha, MarkingMode mode, std::uint64_t seed);

struct BufferedPacket {
  std::uint64_t id = 0;
  double size_bits = 0.0;
  double enqueue_time = 0.0;
  int client = 0;
};

/// Per-AP FIFO with a hard capacity in bits.
class ApBuffer {
 public:
  explicit ApBuffer(double capacity_bits);

  double capacity_bits() const { return capacity_; }
  double occupancy_bits() const { return occupancy_; }
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }

  /// False (and no change) when the packet does not fit.
  bool push(const BufferedPacket& p);
  std::optional<BufferedPacket> pop_front();
  const std::deque<BufferedPacket>& packets() const { return queue_; }

  /// Removes and returns the first packet that pred accepts.
  template <typename Pred>
  std::optional<BufferedPacket> pop_first_if(Pred pred) {
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
      if (pred(*it)) {
        BufferedPacket p = *it;
        queue_.erase(it);
        occupancy_ -= p.size_bits;
        if (queue_.empty()) occupancy_ = 0.0;
        return p;
      }
    }
    return std::nullopt;
  }

  /// Removes every packet of client, in FIFO order.
  std::deque<BufferedPacket> drain_client(int client);
  double client_bits(int client) const;

 private:
  double capacity_;
  double occupancy_ = 0.0;
  std::deque<BufferedPacket> queue_;
};

/// Marking state of one flow: the current alpha and the packet counter.
class FlowMarker {
 public:
  explicit FlowMarker(const SchedulerConfig& cfg) : cfg_(cfg) {}

  /// Recomputes alpha from the trajectory: distance to the nearest switch
  /// line ahead, speed, and the current loss probability. Marking only
  /// happens while the client is closing in on that line.
  void update(std::span<const SwitchLine> lines, const Vec3& pos, const Vec3& velocity, double loss_p);
  double alpha() const { return alpha_; }
  /// Advances the counter and reports whether this packet gets marked.
  bool next();
  std::uint64_t packets_seen() const { return counter_; }

 private:
  SchedulerConfig cfg_;
  double alpha_ = 0.0;
  std::uint64_t counter_ = 0;
};

}  // namespace beamroam
