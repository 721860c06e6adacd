#include "beamroam/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beamroam/error.hpp"

namespace beamroam {

void SelectorState::validate() const {
  if (current_ap < 0 || static_cast<std::size_t>(current_ap) >= anchored_positions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "current AP " + std::to_string(current_ap) + " is not in the layout");
  }
  if (!(direction_window_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "direction window must be positive");
  if (!(lookahead_m > 0.0) || !std::isfinite(lookahead_m)) {
    throw Error(ErrorCode::kInvalidArgument, "lookahead must be positive");
  }
}

namespace {

// Ray-exit rule on the floor plane. With g_i(s) = |x(s) - p_i|^2 - |x(s) - p_cur|^2
// along x(s) = client + s * d_hat, the ray leaves the current cell at the
// smallest s where some g_i turns negative. g_i is linear in s.
int select_relative(const Vec3& d_hat, const Vec3& client_pos, const SelectorState& state, std::size_t& count) {
  const auto& aps = state.anchored_positions;
  const Vec3 c{client_pos.x, client_pos.y, 0.0};
  const Vec3 dir{d_hat.x, d_hat.y, 0.0};
  const Vec3 pc{aps[static_cast<std::size_t>(state.current_ap)].x, aps[static_cast<std::size_t>(state.current_ap)].y, 0.0};
  const double inf = std::numeric_limits<double>::infinity();

  int best = state.current_ap;
  double best_s = inf;
  double best_g = 0.0;
  double best_b = 0.0;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    ++count;
    if (static_cast<int>(i) == state.current_ap) continue;
    const Vec3 pi{aps[i].x, aps[i].y, 0.0};
    const double a = squared_distance(c, pi) - squared_distance(c, pc);
    const double b = 2.0 * dot(dir, pc - pi);
    double s = inf;
    if (a < 0.0 || (a == 0.0 && b < 0.0)) {
      s = 0.0;
    } else if (b < 0.0) {
      s = -a / b;
    }
    if (s > state.lookahead_m) continue;
    // Same entry point: deeper past the bisector wins, then the steeper
    // entry, then the lower id (implied by the strict comparisons).
    const double g = s == 0.0 ? a : 0.0;
    if (s < best_s || (s == best_s && (g < best_g || (g == best_g && b < best_b)))) {
      best = static_cast<int>(i);
      best_s = s;
      best_g = g;
      best_b = b;
    }
  }
  return best;
}

}  // namespace

int select_ap(const Vec3& direction, const Vec3& client_pos, const SelectorState& state, std::size_t* comparisons) {
  state.validate();
  const Vec3 d_hat = normalized(direction);
  std::size_t count = 0;
  int best = 0;
  if (state.mode == SelectorMode::kRelative) {
    best = select_relative(d_hat, client_pos, state, count);
  } else {
    // Running minimum from +inf; strict < keeps the lowest id on ties.
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.anchored_positions.size(); ++i) {
      const double d = squared_distance(d_hat, state.anchored_positions[i]);
      ++count;
      if (d < d_min) {
        d_min = d;
        best = static_cast<int>(i);
      }
    }
  }
  if (comparisons != nullptr) *comparisons = count;
  return best;
}

Vec3 window_direction(const MobilityTrace& trace, double t, double window_s) {
  const double t0 = std::max(trace.start_time(), t - window_s);
  if (t - t0 < 1e-6) throw Error(ErrorCode::kDegenerateWindow, "no motion history before the crossing");
  return moving_direction(trace, t0, t);
}

Selector::Selector(const ApLayout& layout, const SelectionConfig& cfg, int initial_ap)
    : layout_(&layout), cfg_(cfg), current_(initial_ap) {
  if (!layout.contains(initial_ap)) {
    throw Error(ErrorCode::kInvalidArgument, "initial AP " + std::to_string(initial_ap) + " is not in the layout");
  }
  lines_ = switch_lines_for(layout, current_);
}

std::optional<int> Selector::crossed(const Vec3& prev, const Vec3& cur) const {
  std::optional<int> hit;
  double margin = -std::numeric_limits<double>::infinity();
  for (const auto& ln : lines_) {
    if (!crossed_switch_line(ln, prev, cur)) continue;
    const double sd = ln.signed_distance(cur);
    if (sd > margin) {
      margin = sd;
      hit = ln.neighbor_ap;
    }
  }
  return hit;
}

namespace {

std::optional<Selector::Crossing> first_crossing(const std::vector<SwitchLine>& lines, const Vec3& prev,
                                                 const Vec3& cur, double after) {
  std::optional<Selector::Crossing> out;
  for (const auto& ln : lines) {
    const double s0 = ln.signed_distance(prev);
    const double s1 = ln.signed_distance(cur);
    if (s1 < 0.0 || s0 + after * (s1 - s0) >= 0.0) continue;
    const double f = s0 / (s0 - s1);
    if (!(f > after)) continue;
    if (!out || f < out->fraction || (f == out->fraction && ln.neighbor_ap < out->neighbor)) {
      out = Selector::Crossing{f, ln.neighbor_ap};
    }
  }
  return out;
}

}  // namespace

std::optional<Selector::Crossing> Selector::next_crossing(const Vec3& prev, const Vec3& cur, double after) const {
  return first_crossing(lines_, prev, cur, after);
}

void Selector::anchor_from(const Vec3& current_ap_estimate) {
  const Vec3 ap0 = current_ap_estimate - layout_->relative_offsets()[static_cast<std::size_t>(current_)];
  anchored_ = anchor_layout(*layout_, ap0);
}

const std::vector<Vec3>& Selector::anchored_positions() const {
  if (!anchored_) throw Error(ErrorCode::kInvalidArgument, "selector has not been anchored");
  return *anchored_;
}

CrossingRecord Selector::decide(double t, int truth, const Vec3& direction, const Vec3& client_pos) {
  SelectorState state;
  state.current_ap = current_;
  state.anchored_positions = anchored_positions();
  state.mode = cfg_.mode;
  state.direction_window_s = cfg_.direction_window_s;
  state.lookahead_m = cfg_.lookahead_m;
  const int chosen = select_ap(direction, client_pos, state);
  CrossingRecord rec{t, current_, chosen, truth};
  if (chosen != current_) {
    current_ = chosen;
    lines_ = switch_lines_for(*layout_, current_);
  }
  return rec;
}

SelectionResult run_selection(const MobilityTrace& trace, const ApLayout& layout, const SampleSet& samples,
                              const SelectionConfig& cfg) {
  if (trace.empty()) throw Error(ErrorCode::kInvalidTrace, "empty trace");
  SelectionResult out;
  const auto positions = layout.positions();
  out.initial_ap = nearest_on_floor(positions, trace.points().front().position);
  Selector sel(layout, cfg, out.initial_ap);

  // A step can cross several cells near a vertex; handle its crossings in
  // order along the segment.
  const auto& pts = trace.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec3& a = pts[i - 1].position;
    const Vec3& b = pts[i].position;
    double done = 0.0;
    while (const auto hit = sel.next_crossing(a, b, done)) {
      done = hit->fraction;
      // Decide inside the entered cell: halfway to where the step leaves it.
      const auto leave = first_crossing(switch_lines_for(layout, hit->neighbor), a, b, done);
      const double f = 0.5 * (done + (leave ? leave->fraction : 1.0));
      const double t = pts[i - 1].t + f * (pts[i].t - pts[i - 1].t);
      const Vec3 at = a + (b - a) * f;
      if (!sel.anchored()) {
        Vec3 est = layout.ap(sel.current_ap()).position;
        if (!cfg.exact_estimation) est = estimate_ap_position(samples, cfg.estimator).position;
        sel.anchor_from(est);
        out.estimated_ap0 = sel.anchored_positions().front();
      }
      Vec3 dir = b - a;
      if (t - std::max(trace.start_time(), t - cfg.direction_window_s) >= 1e-6) {
        const Vec3 w = window_direction(trace, t, cfg.direction_window_s);
        if (squared_norm(w) > 0.0) dir = w;
      }
      const auto rec = sel.decide(t, hit->neighbor, dir, at);
      out.crossings.push_back(rec);
      if (rec.selected != rec.from_ap) out.decisions.push_back({rec.t, rec.from_ap, rec.selected});
    }
  }
  return out;
}

std::vector<HandoffDecision> run_greedy_snr(const MobilityTrace& trace, const ApLayout& layout,
                                            const AntennaPattern& pattern, const ChannelParams& channel) {
  std::vector<HandoffDecision> out;
  if (trace.empty()) return out;
  auto best_at = [&](const Vec3& pos, int keep) {
    int best = keep;
    double best_snr = keep >= 0 ? snr_at(layout.ap(keep), pattern, channel, pos)
                                : -std::numeric_limits<double>::infinity();
    for (const auto& ap : layout.aps()) {
      const double s = snr_at(ap, pattern, channel, pos);
      if (s > best_snr) {
        best_snr = s;
        best = ap.id;
      }
    }
    return best;
  };
  int current = best_at(trace.points().front().position, -1);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto& p = trace.points()[i];
    const int next = best_at(p.position, current);
    if (next != current) {
      out.push_back({p.t, current, next});
      current = next;
    }
  }
  return out;
}

}  // namespace beamroam
