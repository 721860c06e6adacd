#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace beamroam {

/// Room-frame point or direction, meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double squared_norm(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(squared_norm(v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}
/// Drops z; clients walk on the floor while APs hang from the ceiling.
constexpr Vec3 floor_projection(const Vec3& v) { return {v.x, v.y, 0.0}; }
/// Throws kZeroDirection for a zero vector.
Vec3 normalized(const Vec3& v);

struct TracePoint {
  double t = 0.0;
  Vec3 position;

  bool operator==(const TracePoint&) const = default;
};

/// Timestamped client positions, linearly interpolated between samples.
class MobilityTrace {
 public:
  static constexpr double kDefaultMaxSpeed = 3.0;

  MobilityTrace() = default;
  /// Validates strictly increasing timestamps, finite positions and the
  /// per-segment speed limit; throws kInvalidTrace otherwise.
  explicit MobilityTrace(std::vector<TracePoint> points, double max_speed = kDefaultMaxSpeed);

  const std::vector<TracePoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  double start_time() const;
  double end_time() const;
  bool covers(double t) const;

  /// Throws kWindowOutsideTrace when t is outside [start_time, end_time].
  Vec3 position_at(double t) const;
  /// Speed of the segment containing t (the later one at a sample instant).
  double speed_at(double t) const;
  /// Sum of segment lengths.
  double path_length() const;

 private:
  std::size_t segment_index(double t) const;

  std::vector<TracePoint> points_;
};

/// Displacement position(t_prime) - position(t). Either order is accepted so
/// the result is antisymmetric in the window; windows narrower than 1 us
/// raise kDegenerateWindow.
Vec3 moving_direction(const MobilityTrace& trace, double t, double t_prime);

struct ApDescriptor {
  int id = 0;
  Vec3 position;
  Vec3 boresight{0.0, 0.0, -1.0};
  double beamwidth_deg = 60.0;
  double boresight_gain_db = 9.0;

  bool operator==(const ApDescriptor&) const = default;
};

/// AP set A plus the relative geometry G: offsets of every AP from AP_0.
class ApLayout {
 public:
  ApLayout() = default;
  /// Ids must equal their index; floor projections must be distinct.
  explicit ApLayout(std::vector<ApDescriptor> aps);

  const std::vector<ApDescriptor>& aps() const { return aps_; }
  const ApDescriptor& ap(int id) const;
  const std::vector<Vec3>& relative_offsets() const { return offsets_; }
  std::size_t size() const { return aps_.size(); }
  bool contains(int id) const { return id >= 0 && static_cast<std::size_t>(id) < aps_.size(); }
  std::vector<Vec3> positions() const;

 private:
  std::vector<ApDescriptor> aps_;
  std::vector<Vec3> offsets_;
};

/// Places every AP by translating the relative layout so AP_0 sits at
/// anchor_ap0.
std::vector<Vec3> anchor_layout(const ApLayout& layout, const Vec3& anchor_ap0);

/// Vertical plane bisecting the floor segment between two Voronoi-adjacent
/// APs. The normal points from the current AP towards the neighbor, so the
/// current AP's side has negative signed distance.
struct SwitchLine {
  Vec3 point;
  Vec3 normal;
  int current_ap = 0;
  int neighbor_ap = 0;

  double signed_distance(const Vec3& p) const { return dot(floor_projection(p) - point, normal); }
};

/// APs whose floor Voronoi cells share an edge of positive length with ap's.
std::vector<int> voronoi_neighbors(std::span<const Vec3> positions, int ap);
/// One switch line per Voronoi neighbor of current_ap; empty for one AP.
std::vector<SwitchLine> switch_lines_for(const ApLayout& layout, int current_ap);
/// Index of the floor-nearest position (the Voronoi owner); ties go to the
/// lowest index.
int nearest_on_floor(std::span<const Vec3> positions, const Vec3& p);
/// True iff the step prev -> cur moves from the current AP's side onto the
/// neighbor side; landing exactly on the line counts.
bool crossed_switch_line(const SwitchLine& line, const Vec3& prev_pos, const Vec3& cur_pos);

}  // namespace beamroam
