#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "beamroam/geometry.hpp"

namespace beamroam {

/// One observation: positive SNR r (linear scale by default) taken while the
/// client stood at q.
struct Sample {
  double r = 0.0;
  Vec3 q;
};

/// How dB readings become the positive r values the ranking model needs.
enum class SnrScale { kLinear, kDecibel };

class SampleSet {
 public:
  SampleSet() = default;
  /// Throws kInsufficientSamples below two samples, kInvalidArgument for a
  /// non-positive r or a non-finite position.
  explicit SampleSet(std::vector<Sample> samples);

  /// Builds r from SNR in dB. kDecibel keeps the dB value, which must then be
  /// positive.
  static SampleSet from_db(std::span<const std::pair<double, Vec3>> snr_db_at, SnrScale scale = SnrScale::kLinear);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<Sample> samples_;
};

using SamplePair = std::pair<std::uint32_t, std::uint32_t>;

enum class PairStrategy {
  kAuto,         // all pairs up to max_all_pairs samples, random beyond
  kAllPairs,
  kRandomPairs,  // random_pairs_per_sample * s pairs
};

struct PairConfig {
  PairStrategy strategy = PairStrategy::kAuto;
  std::size_t max_all_pairs = 200;
  std::size_t random_pairs_per_sample = 20;
  std::uint64_t seed = 7;

  bool operator==(const PairConfig&) const = default;
};

/// Ordered pair list (j < k for all-pairs); deterministic given the config.
std::vector<SamplePair> make_pairs(std::size_t sample_count, const PairConfig& cfg = {});

/// P(<r_j, r_k>) = r_j / (r_j + r_k). Throws kDegeneratePair when both are 0.
double pair_prob_snr(double r_j, double r_k);
/// P(<d_j, d_k>) = d_k / (d_k + d_j) with d the squared distance to p_a.
double pair_prob_dist(const Vec3& p_a, const Vec3& q_j, const Vec3& q_k);

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before logs.
inline constexpr double kProbEpsilon = 1e-12;

/// Mean pairwise cross-entropy between SNR ranks and distance ranks.
double rank_loss(const Vec3& p_a, const SampleSet& samples);
double rank_loss(const Vec3& p_a, const SampleSet& samples, std::span<const SamplePair> pairs);

/// Closed-form gradient of rank_loss in p_a. Pairs whose distance
/// probability sits on the clamp contribute nothing.
Vec3 rank_loss_gradient(const Vec3& p_a, const SampleSet& samples);
Vec3 rank_loss_gradient(const Vec3& p_a, const SampleSet& samples, std::span<const SamplePair> pairs);

enum class InitStrategy { kCentroidAtCeiling, kExplicit };

struct EstimatorConfig {
  double learning_rate = 0.05;
  int max_iters = 5000;
  double grad_tol = 1e-7;
  // Accepted steps multiply the rate by this; rejected ones halve it.
  double lr_growth = 1.2;
  InitStrategy init = InitStrategy::kCentroidAtCeiling;
  double ceiling_height_m = 3.0;
  Vec3 init_point;
  PairConfig pairs;

  void validate() const;

  bool operator==(const EstimatorConfig&) const = default;
};

struct EstimateResult {
  Vec3 position;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;
};

/// Gradient descent with step halving from cfg's initial point.
/// Throws kInsufficientSamples unless two distinct positions are present and
/// kNonFinite if the iterates blow up.
EstimateResult estimate_ap_position(const SampleSet& samples, const EstimatorConfig& cfg = {});

struct Box {
  Vec3 lo;
  Vec3 hi;
};

/// Exhaustive rank_loss minimum over cell centers of a grid with cells no
/// larger than resolution; ties go to the first cell in x-major order.
Vec3 grid_search_oracle(const SampleSet& samples, const Box& bounds, double resolution);
Vec3 grid_search_oracle(const SampleSet& samples, std::span<const SamplePair> pairs, const Box& bounds,
                        double resolution);

}  // namespace beamroam
