#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "beamroam/error.hpp"
#include "beamroam/geometry.hpp"

using namespace beamroam;

namespace {

MobilityTrace sampled_line(double t0, double t1, double hz, Vec3 origin, Vec3 velocity) {
  std::vector<TracePoint> pts;
  const int n = static_cast<int>(std::lround((t1 - t0) * hz));
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i / hz;
    pts.push_back({t, origin + velocity * t});
  }
  return MobilityTrace(pts);
}

ApLayout grid_layout() {
  std::vector<ApDescriptor> aps;
  for (int k = 0; k < 3; ++k) {
    aps.push_back({2 * k, {5.0 * k, 0, 3}});
    aps.push_back({2 * k + 1, {5.0 * k, 5, 3}});
  }
  return ApLayout(aps);
}

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

// Owner of every 1 cm floor cell; two APs are adjacent when some pair of
// edge-sharing cells belongs to them.
std::set<std::pair<int, int>> raster_adjacency(const std::vector<Vec3>& aps, double x0, double x1, double y0,
                                               double y1, double cell) {
  const int nx = static_cast<int>(std::lround((x1 - x0) / cell));
  const int ny = static_cast<int>(std::lround((y1 - y0) / cell));
  std::vector<int> owner(static_cast<std::size_t>(nx * ny));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double x = x0 + (i + 0.5) * cell;
      const double y = y0 + (j + 0.5) * cell;
      int best = 0;
      double bd = 1e300;
      for (std::size_t a = 0; a < aps.size(); ++a) {
        const double d = (aps[a].x - x) * (aps[a].x - x) + (aps[a].y - y) * (aps[a].y - y);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(a);
        }
      }
      owner[static_cast<std::size_t>(i * ny + j)] = best;
    }
  }
  std::set<std::pair<int, int>> adj;
  auto note = [&](int a, int b) {
    if (a != b) adj.insert({std::min(a, b), std::max(a, b)});
  };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int o = owner[static_cast<std::size_t>(i * ny + j)];
      if (i + 1 < nx) note(o, owner[static_cast<std::size_t>((i + 1) * ny + j)]);
      if (j + 1 < ny) note(o, owner[static_cast<std::size_t>(i * ny + j + 1)]);
    }
  }
  return adj;
}

}  // namespace

TEST(MovingDirection, StationaryTraceIsZero) {
  MobilityTrace tr({{0, {1, 2, 1}}, {1, {1, 2, 1}}, {2, {1, 2, 1}}});
  EXPECT_EQ(moving_direction(tr, 0.3, 1.7), (Vec3{0, 0, 0}));
}

TEST(MovingDirection, TwoSampleDifference) {
  MobilityTrace tr({{0, {0, 0, 0}}, {1, {1, 2, 0}}});
  EXPECT_EQ(moving_direction(tr, 0, 1), (Vec3{1, 2, 0}));
}

TEST(MovingDirection, InterpolatesSampledLine) {
  const auto tr = sampled_line(0, 5, 10, {0, 0, 0}, {1, 0.5, 0});
  expect_vec_near(moving_direction(tr, 2.0, 3.5), {1.5, 0.75, 0}, 1e-9);
  expect_vec_near(moving_direction(tr, 2.03, 3.57), {1.54, 0.77, 0}, 1e-9);
}

TEST(MovingDirection, Errors) {
  const auto tr = sampled_line(0, 2, 10, {0, 0, 0}, {1, 0, 0});
  try {
    moving_direction(tr, 1.0, 2.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWindowOutsideTrace);
  }
  try {
    moving_direction(tr, 1.0, 1.0 + 1e-7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateWindow);
  }
}

TEST(MovingDirection, AntisymmetricInWindow) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TracePoint> pts;
  Vec3 p;
  for (int i = 0; i <= 100; ++i) {
    pts.push_back({i * 0.1, p});
    p += Vec3{u(rng) * 0.2 - 0.1, u(rng) * 0.2 - 0.1, 0};
  }
  MobilityTrace tr(pts);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng) * 10, b = u(rng) * 10;
    if (std::abs(a - b) < 1e-3) continue;
    EXPECT_EQ(moving_direction(tr, a, b), -moving_direction(tr, b, a));
  }
}

TEST(MobilityTrace, RejectsBadInput) {
  EXPECT_THROW(MobilityTrace({{0, {0, 0, 0}}, {0, {0, 0, 0}}}), Error);
  EXPECT_THROW(MobilityTrace({{0, {0, 0, 0}}, {1, {5, 0, 0}}}), Error);
  EXPECT_NO_THROW(MobilityTrace({{0, {0, 0, 0}}, {1, {3, 0, 0}}}));
  EXPECT_THROW(MobilityTrace({{0, {0, 0, 0}}, {1, {NAN, 0, 0}}}), Error);
}

TEST(MobilityTrace, PathLengthAndSpeed) {
  const auto tr = sampled_line(0, 10, 10, {0, 0, 1}, {1.4, 0, 0});
  EXPECT_NEAR(tr.path_length(), 14.0, 1e-9);
  EXPECT_NEAR(tr.speed_at(3.33), 1.4, 1e-9);
  EXPECT_NEAR(tr.speed_at(10.0), 1.4, 1e-9);
}

TEST(AnchorLayout, ZeroOffsets) {
  ApLayout l(std::vector<ApDescriptor>{{0, {0, 0, 3}}});
  const auto out = anchor_layout(l, {1, 1, 1});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (Vec3{1, 1, 1}));
}

TEST(AnchorLayout, Translation) {
  ApLayout l(std::vector<ApDescriptor>{{0, {0, 0, 0}}, {1, {5, 0, 0}}});
  const auto out = anchor_layout(l, {2, 3, 0});
  EXPECT_EQ(out[0], (Vec3{2, 3, 0}));
  EXPECT_EQ(out[1], (Vec3{7, 3, 0}));
}

TEST(AnchorLayout, PreservesPairwiseDistances) {
  const auto l = grid_layout();
  const auto out = anchor_layout(l, {0.37, -0.21, 2.83});
  const auto orig = l.positions();
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      EXPECT_NEAR(distance(out[i], out[j]), distance(orig[i], orig[j]), 1e-12);
    }
  }
}

TEST(AnchorLayout, TranslationEquivariant) {
  const auto l = grid_layout();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    const auto x = anchor_layout(l, a + d);
    const auto y = anchor_layout(l, a);
    for (std::size_t i = 0; i < x.size(); ++i) expect_vec_near(x[i], y[i] + d, 1e-12);
  }
}

TEST(ApLayout, Validation) {
  EXPECT_THROW(ApLayout(std::vector<ApDescriptor>{}), Error);
  EXPECT_THROW(ApLayout(std::vector<ApDescriptor>{{1, {0, 0, 3}}}), Error);
  EXPECT_THROW(ApLayout(std::vector<ApDescriptor>{{0, {0, 0, 3}}, {1, {0, 0, 2}}}), Error);
  ApDescriptor bad{0, {0, 0, 3}};
  bad.boresight = {0, 0, -2};
  EXPECT_THROW(ApLayout(std::vector<ApDescriptor>{bad}), Error);
  bad.boresight = {0, 0, -1};
  bad.beamwidth_deg = 0;
  EXPECT_THROW(ApLayout(std::vector<ApDescriptor>{bad}), Error);
  EXPECT_EQ(grid_layout().relative_offsets()[0], (Vec3{0, 0, 0}));
}

TEST(SwitchLines, SingleApHasNone) {
  ApLayout l(std::vector<ApDescriptor>{{0, {0, 0, 3}}});
  EXPECT_TRUE(switch_lines_for(l, 0).empty());
}

TEST(SwitchLines, PairBisector) {
  ApLayout l(std::vector<ApDescriptor>{{0, {0, 0, 3}}, {1, {10, 0, 3}}});
  const auto lines = switch_lines_for(l, 0);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].point, (Vec3{5, 0, 0}));
  EXPECT_EQ(lines[0].normal, (Vec3{1, 0, 0}));
  EXPECT_EQ(lines[0].neighbor_ap, 1);
}

TEST(SwitchLines, GridMatchesRasterVoronoi) {
  const auto l = grid_layout();
  const auto raster = raster_adjacency(l.positions(), -2.5, 12.5, -2.5, 7.5, 0.01);
  std::set<std::pair<int, int>> analytic;
  for (int a = 0; a < 6; ++a) {
    const auto lines = switch_lines_for(l, a);
    const std::size_t expected = (a == 2 || a == 3) ? 3u : 2u;
    EXPECT_EQ(lines.size(), expected) << "AP " << a;
    for (const auto& ln : lines) analytic.insert({std::min(a, ln.neighbor_ap), std::max(a, ln.neighbor_ap)});
  }
  EXPECT_EQ(analytic, raster);
}

TEST(SwitchLines, RandomLayoutsMatchRasterVoronoi) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> pos;
    for (int i = 0; i < 5; ++i) pos.push_back({u(rng), u(rng), 3});
    // The raster only sees edges inside its window; make it wide enough that
    // every finite vertex and every unbounded edge shows up.
    const auto raster = raster_adjacency(pos, -60, 70, -60, 70, 0.05);
    std::set<std::pair<int, int>> analytic;
    for (int a = 0; a < 5; ++a) {
      for (int b : voronoi_neighbors(pos, a)) analytic.insert({std::min(a, b), std::max(a, b)});
    }
    EXPECT_EQ(analytic, raster) << "trial " << trial;
  }
}

TEST(SwitchLines, MidpointAndOppositeDistances) {
  const auto l = grid_layout();
  for (int a = 0; a < 6; ++a) {
    for (const auto& ln : switch_lines_for(l, a)) {
      const Vec3 pa = l.ap(ln.current_ap).position;
      const Vec3 pb = l.ap(ln.neighbor_ap).position;
      EXPECT_NEAR(ln.signed_distance((pa + pb) * 0.5), 0.0, 1e-9);
      EXPECT_NEAR(ln.signed_distance(pa), -ln.signed_distance(pb), 1e-9);
      EXPECT_LT(ln.signed_distance(pa), 0.0);
      EXPECT_NEAR(norm(ln.normal), 1.0, 1e-12);
    }
  }
}

TEST(CrossedSwitchLine, Basics) {
  const SwitchLine ln{{5, 0, 0}, {1, 0, 0}, 0, 1};
  EXPECT_FALSE(crossed_switch_line(ln, {1, 0, 1}, {2, 0, 1}));
  EXPECT_TRUE(crossed_switch_line(ln, {4.5, 0, 1}, {5.5, 0, 1}));
  EXPECT_TRUE(crossed_switch_line(ln, {4.5, 0, 1}, {5.0, 0, 1}));
  EXPECT_FALSE(crossed_switch_line(ln, {5.5, 0, 1}, {4.5, 0, 1}));
}

TEST(CrossedSwitchLine, SampledWalkAcrossBisectorCrossesOnce) {
  const auto l = grid_layout();
  const auto lines = switch_lines_for(l, 0);
  const auto it = std::find_if(lines.begin(), lines.end(), [](const SwitchLine& s) { return s.neighbor_ap == 2; });
  ASSERT_NE(it, lines.end());
  // 3.13 mph is 1.399 m/s.
  const auto tr = sampled_line(0, 5, 10, {0, 0.5, 1}, {1.399, 0, 0});
  int crossings = 0;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    crossings += crossed_switch_line(*it, tr.points()[i - 1].position, tr.points()[i].position);
  }
  EXPECT_EQ(crossings, 1);
}

TEST(CrossedSwitchLine, RandomPlanesAndSegments) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 point{u(rng), u(rng), 0};
    const Vec3 normal = normalized({u(rng), u(rng), 0});
    const SwitchLine ln{point, normal, 0, 1};
    const Vec3 a{u(rng), u(rng), 1}, b{u(rng), u(rng), 1};
    const double sa = ln.signed_distance(a), sb = ln.signed_distance(b);
    if (std::abs(sa) < 1e-6 || std::abs(sb) < 1e-6) continue;
    int count = 0;
    const int n = 50;
    for (int i = 1; i <= n; ++i) {
      count += crossed_switch_line(ln, a + (b - a) * ((i - 1) / double(n)), a + (b - a) * (i / double(n)));
    }
    EXPECT_EQ(count, (sa < 0 && sb > 0) ? 1 : 0);
  }
}

TEST(NearestOnFloor, TiesGoLow) {
  std::vector<Vec3> pos{{0, 0, 3}, {2, 0, 3}};
  EXPECT_EQ(nearest_on_floor(pos, {1, 5, 0}), 0);
  EXPECT_EQ(nearest_on_floor(pos, {1.1, 5, 0}), 1);
}
