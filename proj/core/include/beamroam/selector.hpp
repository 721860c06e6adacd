#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "beamroam/estimator.hpp"
#include "beamroam/geometry.hpp"
#include "beamroam/radio.hpp"

namespace beamroam {

enum class SelectorMode {
  // First anchored floor cell other than the current AP's that a ray from the
  // client along the direction enters within lookahead_m; the current AP if
  // none. A client already outside the current cell gets the cell it is in.
  kRelative,
  // argmin |d_hat - p_ai|^2 with d_hat the unit direction, frame-dependent.
  kLiteral,
};

struct SelectorState {
  int current_ap = 0;
  std::vector<Vec3> anchored_positions;
  SelectorMode mode = SelectorMode::kRelative;
  double direction_window_s = 1.0;
  double lookahead_m = 2.5;

  void validate() const;
};

/// Chooses the AP for a client at client_pos moving along direction. Ties go
/// to the lowest id. When comparisons is non-null it receives the number of
/// candidate distances evaluated (always |A|).
int select_ap(const Vec3& direction, const Vec3& client_pos, const SelectorState& state,
              std::size_t* comparisons = nullptr);

struct HandoffDecision {
  double t = 0.0;
  int from_ap = 0;
  int to_ap = 0;
};

/// One switch-line crossing and what happened at it. truth is the neighbour
/// whose line the client went furthest past; selected equals from when the
/// selector kept the current AP.
struct CrossingRecord {
  double t = 0.0;
  int from_ap = 0;
  int selected = 0;
  int truth = 0;
};

struct SelectionConfig {
  SelectorMode mode = SelectorMode::kRelative;
  double direction_window_s = 1.0;
  double lookahead_m = 2.5;
  // Anchor at the true AP_0 position instead of running the estimator.
  bool exact_estimation = false;
  EstimatorConfig estimator;
};

struct SelectionResult {
  std::vector<HandoffDecision> decisions;
  std::vector<CrossingRecord> crossings;
  std::optional<Vec3> estimated_ap0;
  int initial_ap = 0;
};

/// Replays trace against layout. The client starts on the AP whose floor
/// cell holds the first trace point. At the first switch-line crossing the
/// samples estimate that AP's position, the layout is anchored to it, and
/// every crossing from then on yields a select_ap decision. Sample positions
/// share the room frame with the trace.
SelectionResult run_selection(const MobilityTrace& trace, const ApLayout& layout, const SampleSet& samples,
                              const SelectionConfig& cfg = {});

/// Incremental form of run_selection for callers that learn positions one
/// report at a time (the simulator).
class Selector {
 public:
  Selector(const ApLayout& layout, const SelectionConfig& cfg, int initial_ap);

  int current_ap() const { return current_; }
  bool anchored() const { return anchored_.has_value(); }
  const std::vector<SwitchLine>& lines() const { return lines_; }

  /// Neighbour whose switch line the step prev -> cur crosses, preferring
  /// the line passed by the largest margin.
  std::optional<int> crossed(const Vec3& prev, const Vec3& cur) const;
  struct Crossing {
    double fraction = 0.0;
    int neighbor = 0;
  };
  /// First switch line of the current AP crossed by the segment prev -> cur
  /// strictly after the given fraction of it.
  std::optional<Crossing> next_crossing(const Vec3& prev, const Vec3& cur, double after) const;
  /// Anchors the layout from an estimate of the current AP's position.
  void anchor_from(const Vec3& current_ap_estimate);
  /// Runs select_ap at a crossing and moves to the chosen AP. Requires an
  /// anchor.
  CrossingRecord decide(double t, int truth, const Vec3& direction, const Vec3& client_pos);
  const std::vector<Vec3>& anchored_positions() const;

 private:
  const ApLayout* layout_;
  SelectionConfig cfg_;
  int current_;
  std::vector<SwitchLine> lines_;
  std::optional<std::vector<Vec3>> anchored_;
};

/// Displacement over the direction window ending at t, clipped to the trace
/// start.
Vec3 window_direction(const MobilityTrace& trace, double t, double window_s);

/// Greedy baseline: at every trace sample switch to the AP with the highest
/// SNR (ties keep the current AP, then lowest id).
std::vector<HandoffDecision> run_greedy_snr(const MobilityTrace& trace, const ApLayout& layout,
                                            const AntennaPattern& pattern, const ChannelParams& channel);

}  // namespace beamroam
