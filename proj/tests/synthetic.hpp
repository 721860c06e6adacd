#pragma once

// Test-side sample generators. They use only the public radio formula so the
// generating AP position is the ground truth for the estimator.

#include <cmath>
#include <random>
#include <vector>

#include "beamroam/estimator.hpp"
#include "beamroam/radio.hpp"

namespace synth {

using beamroam::Vec3;

// Random waypoints inside a floor disc, stepping `step` metres per sample
// until `length` metres have been walked.
inline std::vector<Vec3> disc_walk(double length, std::uint64_t seed, Vec3 center, double radius,
                                   double step = 0.14) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  auto target = [&] {
    for (;;) {
      const double x = u(rng), y = u(rng);
      if (x * x + y * y <= radius * radius) return Vec3{center.x + x, center.y + y, center.z};
    }
  };
  Vec3 pos = target();
  Vec3 goal = target();
  std::vector<Vec3> out{pos};
  double walked = 0;
  while (walked < length) {
    const Vec3 d = goal - pos;
    const double n = beamroam::norm(d);
    if (n < step) {
      goal = target();
      continue;
    }
    pos += d * (step / n);
    walked += step;
    out.push_back(pos);
  }
  return out;
}

inline beamroam::SampleSet samples_from(const beamroam::ApDescriptor& ap, const beamroam::AntennaPattern& pattern,
                                        const beamroam::ChannelParams& channel, const std::vector<Vec3>& walk) {
  std::vector<beamroam::Sample> s;
  for (const auto& q : walk) s.push_back({std::pow(10.0, beamroam::snr_at(ap, pattern, channel, q) / 10.0), q});
  return beamroam::SampleSet(s);
}

}  // namespace synth
