#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "beamroam/error.hpp"
#include "beamroam/selector.hpp"
#include "beamroam/sim.hpp"

using namespace beamroam;

namespace {

int nearest_floor(const std::vector<Vec3>& aps, double x, double y) {
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const double v = (aps[i].x - x) * (aps[i].x - x) + (aps[i].y - y) * (aps[i].y - y);
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Independent oracles. Relative: march along the floor ray in 1 cm steps,
// then bisect the first step that leaves the current cell. Literal: scan
// every AP and keep the first strict minimum.
int brute_force(const Vec3& dir, const Vec3& q, const SelectorState& st) {
  const auto& aps = st.anchored_positions;
  if (st.mode == SelectorMode::kRelative) {
    const double n = std::hypot(dir.x, dir.y);
    const double ux = dir.x / n, uy = dir.y / n;
    auto owner = [&](double s) { return nearest_floor(aps, q.x + s * ux, q.y + s * uy); };
    if (owner(0.0) != st.current_ap) return owner(0.0);
    double lo = 0.0;
    for (double s = 0.01; s <= st.lookahead_m + 1e-12; s += 0.01) {
      if (owner(s) != st.current_ap) {
        double hi = s;
        for (int k = 0; k < 60; ++k) {
          const double mid = 0.5 * (lo + hi);
          (owner(mid) == st.current_ap ? lo : hi) = mid;
        }
        return owner(hi);
      }
      lo = s;
    }
    return st.current_ap;
  }
  const double n = std::sqrt(dir.x * dir.x + dir.y * dir.y + dir.z * dir.z);
  const Vec3 d{dir.x / n, dir.y / n, dir.z / n};
  int best = -1;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const double v = squared_distance(d, aps[i]);
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

SelectorState random_state(std::mt19937_64& rng, SelectorMode mode) {
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  SelectorState s;
  s.mode = mode;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) s.anchored_positions.push_back({u(rng), u(rng), 3.0});
  s.current_ap = std::uniform_int_distribution<int>(0, n - 1)(rng);
  return s;
}

}  // namespace

TEST(SelectAp, MatchesBruteForceRelative) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    auto s = random_state(rng, SelectorMode::kRelative);
    const Vec3 dir{u(rng), u(rng), 0.0};
    const Vec3 q{u(rng), u(rng), 1.0};
    if (dir.x == 0.0 && dir.y == 0.0) continue;
    ASSERT_EQ(select_ap(dir, q, s), brute_force(dir, q, s)) << i;
  }
}

TEST(SelectAp, MatchesBruteForceLiteral) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    auto s = random_state(rng, SelectorMode::kLiteral);
    for (auto& p : s.anchored_positions) p = {p.x / 10.0, p.y / 10.0, p.z / 10.0};
    const Vec3 dir{u(rng), u(rng), u(rng)};
    ASSERT_EQ(select_ap(dir, {}, s), brute_force(dir, {}, s)) << i;
  }
}

TEST(SelectAp, ComparisonsEqualLayoutSize) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto s = random_state(rng, i % 2 ? SelectorMode::kLiteral : SelectorMode::kRelative);
    std::size_t n = 0;
    select_ap({1, 0.5, 0}, {0, 0, 1}, s, &n);
    EXPECT_EQ(n, s.anchored_positions.size());
  }
}

TEST(SelectAp, TiesGoToLowestId) {
  SelectorState s;
  s.anchored_positions = {{0, 0, 3}, {4, 1, 3}, {4, -1, 3}, {-4, 0, 3}, {-4, 0, 3}};
  // Heading along +x from under AP 0: both bisectors are met at x = 2.125.
  EXPECT_EQ(select_ap({1, 0, 0}, {0, 0, 1}, s), 1);
  // Heading along -x: APs 3 and 4 coincide.
  EXPECT_EQ(select_ap({-1, 0, 0}, {0, 0, 1}, s), 3);
  SelectorState lit;
  lit.mode = SelectorMode::kLiteral;
  lit.anchored_positions = {{0, 1, 0}, {1, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(select_ap({1, 0, 0}, {}, lit), 1);
}

TEST(SelectAp, ChoosesApAlongMovingDirection) {
  SelectorState s;
  s.anchored_positions = {{10, 0, 3}, {0, 10, 3}};
  for (int cur : {0, 1}) {
    s.current_ap = cur;
    EXPECT_EQ(select_ap({1, 0, 0}, {0, 0, 0}, s), 0) << cur;
  }
}

TEST(SelectAp, ZeroDirectionThrows) {
  SelectorState s;
  s.anchored_positions = {{0, 0, 3}, {5, 0, 3}};
  try {
    select_ap({0, 0, 0}, {}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDirection);
  }
}

TEST(SelectAp, InvalidStateThrows) {
  SelectorState s;
  s.anchored_positions = {{0, 0, 3}};
  s.current_ap = 3;
  EXPECT_THROW(select_ap({1, 0, 0}, {}, s), Error);
  s.current_ap = 0;
  s.lookahead_m = 0.0;
  EXPECT_THROW(select_ap({1, 0, 0}, {}, s), Error);
}

TEST(SelectAp, DirectionMagnitudeIsIrrelevant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0), k(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    for (auto mode : {SelectorMode::kRelative, SelectorMode::kLiteral}) {
      auto s = random_state(rng, mode);
      const Vec3 dir{u(rng), u(rng), 0.0};
      const Vec3 q{u(rng), u(rng), 1.0};
      const double c = k(rng);
      EXPECT_EQ(select_ap(dir, q, s), select_ap(dir * c, q, s));
    }
  }
}

TEST(SelectAp, RelativeModeIsTranslationCovariant) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    auto s = random_state(rng, SelectorMode::kRelative);
    const Vec3 dir{u(rng), u(rng), 0.0};
    const Vec3 q{u(rng), u(rng), 1.0};
    // Power-of-two shift keeps the arithmetic exact.
    const Vec3 shift{64.0, -32.0, 0.0};
    auto moved = s;
    for (auto& p : moved.anchored_positions) p = p + shift;
    EXPECT_EQ(select_ap(dir, q, s), select_ap(dir, q + shift, moved));
  }
}

TEST(SelectAp, PicksApAhead) {
  // Client under AP 0 walking towards AP 1.
  SelectorState s;
  s.anchored_positions = {{0, 0, 3}, {5, 0, 3}, {0, 5, 3}};
  EXPECT_EQ(select_ap({1, 0, 0}, {2.5, 0, 1}, s), 1);
  EXPECT_EQ(select_ap({0, 1, 0}, {0, 2.5, 1}, s), 2);
  EXPECT_EQ(select_ap({-1, 0, 0}, {2.5, 0, 1}, s), 0);
}

namespace {

Scenario tour_scenario() {
  Scenario s;
  s.antenna.beamwidth_deg = 90.0;
  return s;
}

}  // namespace

TEST(RunSelection, TourWithExactAnchorVisitsEveryCellOnce) {
  const auto s = tour_scenario();
  const auto layout = directional_layout(s);
  const auto trace = generate_trace(s, 0);
  SelectionConfig cfg;
  cfg.exact_estimation = true;
  std::vector<Sample> dummy = {{1.0, {0, 0, 1}}, {2.0, {1, 0, 1}}};
  const auto r = run_selection(trace, layout, SampleSet(dummy), cfg);
  const auto order = tour_order(layout);
  ASSERT_EQ(r.decisions.size(), 5u);
  EXPECT_EQ(r.initial_ap, order[0]);
  for (std::size_t i = 0; i < r.decisions.size(); ++i) {
    EXPECT_EQ(r.decisions[i].from_ap, order[i]);
    EXPECT_EQ(r.decisions[i].to_ap, order[i + 1]);
  }
  for (const auto& c : r.crossings) EXPECT_EQ(c.selected, c.truth);
  ASSERT_TRUE(r.estimated_ap0);
  EXPECT_EQ(*r.estimated_ap0, layout.ap(order[0]).position);
}

namespace {

int nearest_cell(const ApLayout& layout, const Vec3& p) {
  std::vector<Vec3> pos;
  for (const auto& ap : layout.aps()) pos.push_back(ap.position);
  return nearest_floor(pos, p.x, p.y);
}

// Cells are convex, so a piece whose ends share a cell stays in it; pieces
// with different ends are split until they are shorter than 1 nm.
int cell_changes(const ApLayout& layout, const Vec3& a, const Vec3& b) {
  if (nearest_cell(layout, a) == nearest_cell(layout, b)) return 0;
  if (distance(a, b) < 1e-9) return 1;
  const Vec3 m = (a + b) * 0.5;
  return cell_changes(layout, a, m) + cell_changes(layout, m, b);
}

}  // namespace

// Handoffs under an exact anchor equal the number of Voronoi cell changes
// along the same walk, rasterized at 1 cm and refined near cell edges.
TEST(RunSelection, ExactAnchorHandoffsEqualCellCrossings) {
  const auto s = tour_scenario();
  const auto layout = directional_layout(s);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(s.room.x_min, s.room.x_max), uy(s.room.y_min, s.room.y_max);
  std::vector<Sample> dummy = {{1.0, {0, 0, 1}}, {2.0, {1, 0, 1}}};
  for (int walk = 0; walk < 1000; ++walk) {
    std::vector<TracePoint> pts;
    std::vector<Vec3> corners;
    for (int k = 0; k < 7; ++k) corners.push_back({ux(rng), uy(rng), 1.0});
    double t = 0.0;
    pts.push_back({t, corners[0]});
    int raster = 0;
    for (std::size_t k = 1; k < corners.size(); ++k) {
      const Vec3 a = corners[k - 1], b = corners[k];
      const double len = distance(a, b);
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.14)));
      for (int i = 1; i <= steps; ++i) {
        t += len / steps / 1.4;
        pts.push_back({t, a + (b - a) * (static_cast<double>(i) / steps)});
      }
      const int fine = std::max(1, static_cast<int>(std::ceil(len / 0.01)));
      for (int i = 1; i <= fine; ++i) {
        raster += cell_changes(layout, a + (b - a) * (static_cast<double>(i - 1) / fine),
                               a + (b - a) * (static_cast<double>(i) / fine));
      }
    }
    SelectionConfig cfg;
    cfg.exact_estimation = true;
    const auto r = run_selection(MobilityTrace(pts), layout, SampleSet(dummy), cfg);
    EXPECT_EQ(static_cast<int>(r.decisions.size()), raster) << walk;
  }
}

TEST(RunSelection, DecisionsAreTimeOrderedAndChained) {
  const auto s = tour_scenario();
  const auto layout = directional_layout(s);
  const auto trace = generate_trace(s, 0);
  SelectionConfig cfg;
  cfg.exact_estimation = true;
  cfg.mode = SelectorMode::kLiteral;
  std::vector<Sample> dummy = {{1.0, {0, 0, 1}}, {2.0, {1, 0, 1}}};
  const auto r = run_selection(trace, layout, SampleSet(dummy), cfg);
  int cur = r.initial_ap;
  double t = -1.0;
  for (const auto& d : r.decisions) {
    EXPECT_EQ(d.from_ap, cur);
    EXPECT_NE(d.to_ap, d.from_ap);
    EXPECT_GT(d.t, t);
    cur = d.to_ap;
    t = d.t;
  }
}

TEST(GreedySnr, SwitchesOnlyToStrictlyBetterAp) {
  const auto s = tour_scenario();
  const auto layout = directional_layout(s);
  const auto trace = generate_trace(s, 0);
  ChannelParams ch = s.channel;
  const auto decisions = run_greedy_snr(trace, layout, s.antenna, ch);
  ASSERT_FALSE(decisions.empty());
  for (const auto& d : decisions) {
    const Vec3 p = trace.position_at(d.t);
    EXPECT_GT(snr_at(layout.ap(d.to_ap), s.antenna, ch, p), snr_at(layout.ap(d.from_ap), s.antenna, ch, p));
  }
}

TEST(WindowDirection, ClipsToTraceStart) {
  MobilityTrace tr({{0.0, {0, 0, 1}}, {1.0, {1, 0, 1}}, {2.0, {2, 0, 1}}});
  EXPECT_EQ(window_direction(tr, 2.0, 1.0), (Vec3{1, 0, 0}));
  EXPECT_EQ(window_direction(tr, 0.5, 1.0), (Vec3{0.5, 0, 0}));
  EXPECT_THROW(window_direction(tr, 0.0, 1.0), Error);
}
