#include "beamroam/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "beamroam/error.hpp"

namespace beamroam {

namespace {

constexpr double kMinWindow = 1e-6;
// Tolerates float rounding in a speed check over 10 Hz samples.
constexpr double kSpeedSlack = 1e-9;

std::string describe(const Vec3& v) {
  std::ostringstream os;
  os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
  return os.str();
}

}  // namespace

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kZeroDirection, "cannot normalize zero or non-finite vector " + describe(v));
  }
  return v / n;
}

MobilityTrace::MobilityTrace(std::vector<TracePoint> points, double max_speed)
    : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.t) || !is_finite(p.position)) {
      throw Error(ErrorCode::kInvalidTrace, "trace sample " + std::to_string(i) + " is not finite");
    }
    if (i == 0) continue;
    const auto& q = points_[i - 1];
    const double dt = p.t - q.t;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kInvalidTrace,
                  "trace timestamps must be strictly increasing at sample " + std::to_string(i));
    }
    const double v = distance(p.position, q.position) / dt;
    if (v > max_speed * (1.0 + kSpeedSlack)) {
      std::ostringstream os;
      os << "trace speed " << v << " m/s at sample " << i << " exceeds limit " << max_speed << " m/s";
      throw Error(ErrorCode::kInvalidTrace, os.str());
    }
  }
}

double MobilityTrace::start_time() const {
  if (points_.empty()) throw Error(ErrorCode::kWindowOutsideTrace, "empty trace");
  return points_.front().t;
}

double MobilityTrace::end_time() const {
  if (points_.empty()) throw Error(ErrorCode::kWindowOutsideTrace, "empty trace");
  return points_.back().t;
}

bool MobilityTrace::covers(double t) const {
  return !points_.empty() && t >= points_.front().t && t <= points_.back().t;
}

std::size_t MobilityTrace::segment_index(double t) const {
  // First sample strictly after t, minus one.
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double value, const TracePoint& p) { return value < p.t; });
  auto idx = static_cast<std::size_t>(std::distance(points_.begin(), it));
  return idx == 0 ? 0 : idx - 1;
}

Vec3 MobilityTrace::position_at(double t) const {
  if (!covers(t)) {
    std::ostringstream os;
    os << "time " << t << " s is outside the trace";
    if (!points_.empty()) os << " [" << points_.front().t << ", " << points_.back().t << ']';
    throw Error(ErrorCode::kWindowOutsideTrace, os.str());
  }
  const std::size_t i = segment_index(t);
  if (i + 1 >= points_.size()) return points_.back().position;
  const auto& a = points_[i];
  const auto& b = points_[i + 1];
  const double w = (t - a.t) / (b.t - a.t);
  return a.position + (b.position - a.position) * w;
}

double MobilityTrace::speed_at(double t) const {
  if (points_.size() < 2) return 0.0;
  std::size_t i = segment_index(t);
  if (i + 1 >= points_.size()) i = points_.size() - 2;
  const auto& a = points_[i];
  const auto& b = points_[i + 1];
  return distance(a.position, b.position) / (b.t - a.t);
}

double MobilityTrace::path_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    total += distance(points_[i].position, points_[i - 1].position);
  }
  return total;
}

Vec3 moving_direction(const MobilityTrace& trace, double t, double t_prime) {
  if (!trace.covers(t) || !trace.covers(t_prime)) {
    std::ostringstream os;
    os << "direction window [" << t << ", " << t_prime << "] is not covered by the trace";
    throw Error(ErrorCode::kWindowOutsideTrace, os.str());
  }
  if (std::abs(t_prime - t) < kMinWindow) {
    throw Error(ErrorCode::kDegenerateWindow, "direction window shorter than 1e-6 s");
  }
  return trace.position_at(t_prime) - trace.position_at(t);
}

ApLayout::ApLayout(std::vector<ApDescriptor> aps) : aps_(std::move(aps)) {
  if (aps_.empty()) throw Error(ErrorCode::kInvalidLayout, "layout has no APs");
  for (std::size_t i = 0; i < aps_.size(); ++i) {
    const auto& ap = aps_[i];
    const std::string name = "AP " + std::to_string(i);
    if (ap.id != static_cast<int>(i)) {
      throw Error(ErrorCode::kInvalidLayout, name + " has id " + std::to_string(ap.id) + "; ids must equal their index");
    }
    if (!is_finite(ap.position)) throw Error(ErrorCode::kInvalidLayout, name + " position is not finite");
    if (!is_finite(ap.boresight) || std::abs(norm(ap.boresight) - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidLayout, name + " boresight must be a unit vector");
    }
    if (!(ap.beamwidth_deg > 0.0 && ap.beamwidth_deg <= 180.0)) {
      throw Error(ErrorCode::kInvalidLayout, name + " beamwidth must lie in (0, 180] degrees");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (squared_distance(floor_projection(aps_[j].position), floor_projection(ap.position)) < 1e-12) {
        throw Error(ErrorCode::kInvalidLayout,
                    name + " shares its floor position with AP " + std::to_string(j));
      }
    }
  }
  offsets_.reserve(aps_.size());
  for (const auto& ap : aps_) offsets_.push_back(ap.position - aps_.front().position);
}

const ApDescriptor& ApLayout::ap(int id) const {
  if (!contains(id)) throw Error(ErrorCode::kInvalidArgument, "unknown AP id " + std::to_string(id));
  return aps_[static_cast<std::size_t>(id)];
}

std::vector<Vec3> ApLayout::positions() const {
  std::vector<Vec3> out;
  out.reserve(aps_.size());
  for (const auto& ap : aps_) out.push_back(ap.position);
  return out;
}

std::vector<Vec3> anchor_layout(const ApLayout& layout, const Vec3& anchor_ap0) {
  if (!is_finite(anchor_ap0)) throw Error(ErrorCode::kInvalidArgument, "anchor is not finite");
  std::vector<Vec3> out;
  out.reserve(layout.size());
  for (const auto& offset : layout.relative_offsets()) out.push_back(anchor_ap0 + offset);
  return out;
}

std::vector<int> voronoi_neighbors(std::span<const Vec3> positions, int ap) {
  const auto n = static_cast<int>(positions.size());
  if (ap < 0 || ap >= n) throw Error(ErrorCode::kInvalidArgument, "unknown AP id " + std::to_string(ap));
  std::vector<int> out;
  const Vec3 pi = floor_projection(positions[static_cast<std::size_t>(ap)]);
  for (int j = 0; j < n; ++j) {
    if (j == ap) continue;
    const Vec3 pj = floor_projection(positions[static_cast<std::size_t>(j)]);
    const Vec3 mid = (pi + pj) * 0.5;
    const Vec3 along{-(pj.y - pi.y), pj.x - pi.x, 0.0};
    const double scale = norm(pj - pi);
    // Clip the bisector line p(s) = mid + s * along by every other AP's
    // half-plane |p - pi|^2 <= |p - pk|^2.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool empty = false;
    for (int k = 0; k < n && !empty; ++k) {
      if (k == ap || k == j) continue;
      const Vec3 pk = floor_projection(positions[static_cast<std::size_t>(k)]);
      const Vec3 a = pk - pi;
      const double c = squared_norm(pk) - squared_norm(pi);
      const double base = 2.0 * dot(mid, a);
      const double slope = 2.0 * dot(along, a);
      const double tol = 1e-12 * (std::abs(c) + squared_norm(a) + 1.0);
      if (std::abs(slope) <= tol) {
        if (base > c + tol) empty = true;
      } else if (slope > 0.0) {
        hi = std::min(hi, (c - base) / slope);
      } else {
        lo = std::max(lo, (c - base) / slope);
      }
    }
    // Edge length is (hi - lo) * |along| = (hi - lo) * scale.
    if (!empty && (hi - lo) * scale > 1e-9 * (scale + 1.0)) out.push_back(j);
  }
  return out;
}

std::vector<SwitchLine> switch_lines_for(const ApLayout& layout, int current_ap) {
  if (!layout.contains(current_ap)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown AP id " + std::to_string(current_ap));
  }
  const auto positions = layout.positions();
  std::vector<SwitchLine> lines;
  const Vec3 here = floor_projection(positions[static_cast<std::size_t>(current_ap)]);
  for (int j : voronoi_neighbors(positions, current_ap)) {
    const Vec3 there = floor_projection(positions[static_cast<std::size_t>(j)]);
    lines.push_back(SwitchLine{(here + there) * 0.5, normalized(there - here), current_ap, j});
  }
  return lines;
}

int nearest_on_floor(std::span<const Vec3> positions, const Vec3& p) {
  if (positions.empty()) throw Error(ErrorCode::kInvalidArgument, "no positions");
  const Vec3 q = floor_projection(p);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double d = squared_distance(floor_projection(positions[i]), q);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

bool crossed_switch_line(const SwitchLine& line, const Vec3& prev_pos, const Vec3& cur_pos) {
  return line.signed_distance(prev_pos) < 0.0 && line.signed_distance(cur_pos) >= 0.0;
}

}  // namespace beamroam
