#include "beamroam/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beamroam/error.hpp"
#include "beamroam/hash_random.hpp"

namespace beamroam {

namespace {

// Neumaier summation keeps the loss reproducible to the last few ulps no
// matter how many pairs are summed.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<SamplePair> all_pairs(std::size_t n) {
  std::vector<SamplePair> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      out.emplace_back(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k));
    }
  }
  return out;
}

bool has_two_positions(const SampleSet& samples) {
  for (const auto& s : samples.samples()) {
    if (!(s.q == samples[0].q)) return true;
  }
  return false;
}

struct PairTerm {
  double loss = 0.0;
  // dloss/dD_k * D_k, i.e. (P_d - P_r); zero on the clamp.
  double slope = 0.0;
  double dj = 0.0;
  double dk = 0.0;
};

PairTerm pair_term(const Vec3& p_a, const Sample& sj, const Sample& sk) {
  PairTerm out;
  const double pr = sj.r / (sj.r + sk.r);
  out.dj = squared_distance(p_a, sj.q);
  out.dk = squared_distance(p_a, sk.q);
  const double total = out.dj + out.dk;
  double pd = total > 0.0 ? out.dk / total : 0.5;
  double one_minus = total > 0.0 ? out.dj / total : 0.5;
  if (pd < kProbEpsilon) {
    pd = kProbEpsilon;
    one_minus = 1.0 - kProbEpsilon;
  } else if (one_minus < kProbEpsilon) {
    one_minus = kProbEpsilon;
    pd = 1.0 - kProbEpsilon;
  } else {
    out.slope = pd - pr;
  }
  out.loss = -(pr * std::log(pd) + (1.0 - pr) * std::log(one_minus));
  return out;
}

void require_pairs(const SampleSet& samples, std::span<const SamplePair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kInsufficientSamples, "rank loss needs at least one sample pair");
  for (const auto& [j, k] : pairs) {
    if (j >= samples.size() || k >= samples.size()) {
      throw Error(ErrorCode::kInvalidArgument, "sample pair index out of range");
    }
  }
}

}  // namespace

SampleSet::SampleSet(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "need at least 2 samples, got " + std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(samples_[i].r > 0.0) || !std::isfinite(samples_[i].r)) {
      throw Error(ErrorCode::kInvalidArgument, "sample " + std::to_string(i) + " has non-positive SNR");
    }
    if (!is_finite(samples_[i].q)) {
      throw Error(ErrorCode::kInvalidArgument, "sample " + std::to_string(i) + " has a non-finite position");
    }
  }
}

SampleSet SampleSet::from_db(std::span<const std::pair<double, Vec3>> snr_db_at, SnrScale scale) {
  std::vector<Sample> out;
  out.reserve(snr_db_at.size());
  for (const auto& [db, q] : snr_db_at) {
    const double r = scale == SnrScale::kLinear ? std::pow(10.0, db / 10.0) : db;
    out.push_back({r, q});
  }
  return SampleSet(std::move(out));
}

std::vector<SamplePair> make_pairs(std::size_t n, const PairConfig& cfg) {
  if (n < 2) throw Error(ErrorCode::kInsufficientSamples, "pairs need at least 2 samples");
  const bool random = cfg.strategy == PairStrategy::kRandomPairs ||
                      (cfg.strategy == PairStrategy::kAuto && n > cfg.max_all_pairs);
  if (!random) return all_pairs(n);

  const std::size_t m = std::max<std::size_t>(1, cfg.random_pairs_per_sample * n);
  std::vector<SamplePair> out;
  out.reserve(m);
  for (std::size_t i = 0; out.size() < m; ++i) {
    const auto j = static_cast<std::uint32_t>(uniform01(hash_key(cfg.seed, i, 1)) * static_cast<double>(n));
    const auto k = static_cast<std::uint32_t>(uniform01(hash_key(cfg.seed, i, 2)) * static_cast<double>(n));
    if (j == k || j >= n || k >= n) continue;
    out.emplace_back(std::min(j, k), std::max(j, k));
  }
  return out;
}

double pair_prob_snr(double r_j, double r_k) {
  const double total = r_j + r_k;
  if (total == 0.0) throw Error(ErrorCode::kDegeneratePair, "both SNR values are zero");
  return r_j / total;
}

double pair_prob_dist(const Vec3& p_a, const Vec3& q_j, const Vec3& q_k) {
  const double dj = squared_distance(p_a, q_j);
  const double dk = squared_distance(p_a, q_k);
  const double total = dj + dk;
  if (total == 0.0) throw Error(ErrorCode::kDegeneratePair, "both sample positions coincide with the AP");
  return dk / total;
}

double rank_loss(const Vec3& p_a, const SampleSet& samples) {
  const auto pairs = all_pairs(samples.size());
  return rank_loss(p_a, samples, pairs);
}

double rank_loss(const Vec3& p_a, const SampleSet& samples, std::span<const SamplePair> pairs) {
  require_pairs(samples, pairs);
  CompensatedSum sum;
  for (const auto& [j, k] : pairs) sum.add(pair_term(p_a, samples[j], samples[k]).loss);
  return sum.value() / static_cast<double>(pairs.size());
}

Vec3 rank_loss_gradient(const Vec3& p_a, const SampleSet& samples) {
  const auto pairs = all_pairs(samples.size());
  return rank_loss_gradient(p_a, samples, pairs);
}

Vec3 rank_loss_gradient(const Vec3& p_a, const SampleSet& samples, std::span<const SamplePair> pairs) {
  require_pairs(samples, pairs);
  CompensatedSum gx, gy, gz;
  for (const auto& [j, k] : pairs) {
    const PairTerm t = pair_term(p_a, samples[j], samples[k]);
    if (t.slope == 0.0) continue;
    // dl/dD_k = slope / D_k, dl/dD_j = -slope / D_j, dD/dp = 2 (p - q).
    const Vec3 g = (p_a - samples[k].q) * (2.0 * t.slope / t.dk) - (p_a - samples[j].q) * (2.0 * t.slope / t.dj);
    gx.add(g.x);
    gy.add(g.y);
    gz.add(g.z);
  }
  const double m = static_cast<double>(pairs.size());
  return {gx.value() / m, gy.value() / m, gz.value() / m};
}

void EstimatorConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be at least 1");
  if (!(grad_tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "grad_tol must be non-negative");
  if (!(lr_growth >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "lr_growth must be at least 1");
  if (!std::isfinite(ceiling_height_m)) throw Error(ErrorCode::kInvalidArgument, "ceiling height must be finite");
  if (init == InitStrategy::kExplicit && !is_finite(init_point)) {
    throw Error(ErrorCode::kInvalidArgument, "initial point must be finite");
  }
  if (pairs.random_pairs_per_sample < 1) {
    throw Error(ErrorCode::kInvalidArgument, "random_pairs_per_sample must be at least 1");
  }
}

EstimateResult estimate_ap_position(const SampleSet& samples, const EstimatorConfig& cfg) {
  cfg.validate();
  if (samples.size() < 2 || !has_two_positions(samples)) {
    throw Error(ErrorCode::kInsufficientSamples, "samples must span at least two distinct positions");
  }
  const auto pairs = make_pairs(samples.size(), cfg.pairs);

  Vec3 p = cfg.init_point;
  if (cfg.init == InitStrategy::kCentroidAtCeiling) {
    Vec3 c;
    for (const auto& s : samples.samples()) c += s.q;
    p = c / static_cast<double>(samples.size());
    p.z = cfg.ceiling_height_m;
  }

  EstimateResult res;
  double loss = rank_loss(p, samples, pairs);
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFinite, "loss is not finite at the initial point");
  res.loss_history.push_back(loss);

  double lr = cfg.learning_rate;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Vec3 g = rank_loss_gradient(p, samples, pairs);
    if (!is_finite(g)) throw Error(ErrorCode::kNonFinite, "gradient is not finite");
    const double gn = norm(g);
    if (gn <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
    // Halve until the step does not increase the loss or stops moving p.
    bool accepted = false;
    while (lr * gn > 1e-15 * (1.0 + norm(p))) {
      const Vec3 cand = p - g * lr;
      const double cand_loss = rank_loss(cand, samples, pairs);
      if (!is_finite(cand) || !std::isfinite(cand_loss)) {
        throw Error(ErrorCode::kNonFinite, "estimate diverged");
      }
      if (cand_loss <= loss) {
        p = cand;
        loss = cand_loss;
        lr *= cfg.lr_growth;
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) {
      // No representable descent step left: a numerical stationary point.
      res.converged = true;
      break;
    }
    res.loss_history.push_back(loss);
  }

  res.position = p;
  res.loss = loss;
  res.iterations = it;
  return res;
}

Vec3 grid_search_oracle(const SampleSet& samples, const Box& bounds, double resolution) {
  const auto pairs = all_pairs(samples.size());
  return grid_search_oracle(samples, pairs, bounds, resolution);
}

Vec3 grid_search_oracle(const SampleSet& samples, std::span<const SamplePair> pairs, const Box& bounds,
                        double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid resolution must be positive");
  if (!is_finite(bounds.lo) || !is_finite(bounds.hi) || bounds.hi.x < bounds.lo.x || bounds.hi.y < bounds.lo.y ||
      bounds.hi.z < bounds.lo.z) {
    throw Error(ErrorCode::kInvalidArgument, "grid bounds are empty");
  }
  const auto cells = [&](double lo, double hi) {
    return std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / resolution - 1e-9)));
  };
  const long nx = cells(bounds.lo.x, bounds.hi.x);
  const long ny = cells(bounds.lo.y, bounds.hi.y);
  const long nz = cells(bounds.lo.z, bounds.hi.z);
  const Vec3 step{(bounds.hi.x - bounds.lo.x) / static_cast<double>(nx),
                  (bounds.hi.y - bounds.lo.y) / static_cast<double>(ny),
                  (bounds.hi.z - bounds.lo.z) / static_cast<double>(nz)};

  Vec3 best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < ny; ++j) {
      for (long k = 0; k < nz; ++k) {
        const Vec3 c{bounds.lo.x + (static_cast<double>(i) + 0.5) * step.x,
                     bounds.lo.y + (static_cast<double>(j) + 0.5) * step.y,
                     bounds.lo.z + (static_cast<double>(k) + 0.5) * step.z};
        const double l = rank_loss(c, samples, pairs);
        if (l < best_loss) {
          best_loss = l;
          best = c;
        }
      }
    }
  }
  return best;
}

}  // namespace beamroam
