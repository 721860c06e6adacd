#include "beamroam/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "beamroam/error.hpp"
#include "beamroam/hash_random.hpp"

namespace beamroam {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

void validate_steps(const std::vector<RateStep>& steps, const char* name) {
  require(!steps.empty(), std::string(name) + " rate table is empty");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    require(std::isfinite(steps[i].snr_threshold_db) && steps[i].rate_mbps > 0.0,
            std::string(name) + " rate table step " + std::to_string(i) + " is invalid");
    if (i == 0) continue;
    require(steps[i].snr_threshold_db > steps[i - 1].snr_threshold_db,
            std::string(name) + " thresholds must be strictly increasing");
    require(steps[i].rate_mbps > steps[i - 1].rate_mbps,
            std::string(name) + " rates must be strictly increasing");
  }
}

}  // namespace

double AntennaPattern::gain_db(double off_boresight_deg) const {
  if (omnidirectional) return omni_gain_db;
  return off_boresight_deg <= beamwidth_deg * 0.5 ? boresight_gain_db : back_lobe_db;
}

void AntennaPattern::validate() const {
  if (omnidirectional) {
    require(std::isfinite(omni_gain_db), "omni gain must be finite");
    return;
  }
  require(beamwidth_deg > 0.0 && beamwidth_deg <= 180.0, "beamwidth must lie in (0, 180] degrees");
  require(boresight_gain_db > back_lobe_db, "boresight gain must exceed the back-lobe gain");
}

void ChannelParams::validate() const {
  require(path_loss_exponent >= 1.5 && path_loss_exponent <= 6.0, "path-loss exponent must lie in [1.5, 6]");
  require(shadowing_sigma_db >= 0.0, "shadowing sigma must be non-negative");
  require(shadowing_cell_m > 0.0, "shadowing cell must be positive");
  require(std::isfinite(ref_loss_db) && std::isfinite(tx_power_dbm) && std::isfinite(noise_floor_dbm),
          "channel powers must be finite");
}

int bandwidth_mhz(Bandwidth bw) { return bw == Bandwidth::k20MHz ? 20 : 40; }

Bandwidth bandwidth_from_mhz(int mhz) {
  if (mhz == 20) return Bandwidth::k20MHz;
  if (mhz == 40) return Bandwidth::k40MHz;
  throw Error(ErrorCode::kInvalidArgument, "bandwidth must be 20 or 40 MHz, got " + std::to_string(mhz));
}

void PhyRateTable::validate() const {
  validate_steps(mhz20, "20 MHz");
  validate_steps(mhz40, "40 MHz");
}

PhyRateTable PhyRateTable::defaults() {
  // 18 dB -> 15 Mbps and 30 dB -> 45 Mbps are measured medians; the other
  // steps interpolate between and around them.
  PhyRateTable t;
  t.mhz20 = {{5, 2}, {8, 5}, {11, 8}, {14, 11}, {18, 15}, {21, 22}, {24, 30}, {27, 37}, {30, 45}, {33, 50}};
  // Same thresholds at 1.96x the rate.
  for (const auto& s : t.mhz20) t.mhz40.push_back({s.snr_threshold_db, s.rate_mbps * 1.96});
  return t;
}

double LossModel::base(double snr_db) const {
  if (snr_db < low_snr_db) return p_low;
  if (snr_db <= high_snr_db) return p_mid;
  return p_high;
}

void LossModel::validate() const {
  require(low_snr_db < high_snr_db, "loss model thresholds must be increasing");
  require(p_low >= p_mid && p_mid >= p_high && p_high >= 0.0 && p_low <= 1.0,
          "loss model probabilities must be non-increasing in SNR and within [0, 1]");
  require(k_mobility >= 0.0, "mobility loss coefficient must be non-negative");
}

double off_boresight_deg(const ApDescriptor& ap, const Vec3& pos) {
  const Vec3 u = normalized(pos - ap.position);
  const double c = std::clamp(dot(u, ap.boresight), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

double shadowing_db(const ChannelParams& channel, int ap_id, const Vec3& pos) {
  if (channel.shadowing_sigma_db == 0.0) return 0.0;
  const auto cx = static_cast<std::int64_t>(std::floor(pos.x / channel.shadowing_cell_m));
  const auto cy = static_cast<std::int64_t>(std::floor(pos.y / channel.shadowing_cell_m));
  const auto key = hash_key(channel.seed, static_cast<std::uint64_t>(ap_id) + 1,
                            static_cast<std::uint64_t>(cx), static_cast<std::uint64_t>(cy));
  return channel.shadowing_sigma_db * standard_normal(key);
}

double snr_at(const ApDescriptor& ap, const AntennaPattern& pattern, const ChannelParams& channel,
              const Vec3& pos) {
  const double d = distance(ap.position, pos);
  if (!(d > 0.0)) throw Error(ErrorCode::kZeroDistance, "client coincides with AP " + std::to_string(ap.id));
  const double gain = pattern.gain_db(off_boresight_deg(ap, pos));
  const double path_loss = channel.ref_loss_db + 10.0 * channel.path_loss_exponent * std::log10(d);
  return channel.tx_power_dbm + gain - path_loss - channel.noise_floor_dbm + shadowing_db(channel, ap.id, pos);
}

double phy_rate(const PhyRateTable& table, double snr_db, Bandwidth bw) {
  double rate = 0.0;
  for (const auto& step : table.steps(bw)) {
    if (step.snr_threshold_db <= snr_db) rate = step.rate_mbps;
  }
  return rate;
}

double loss_prob(double snr_db, double speed_mps, const LossModel& model) {
  if (!(speed_mps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "speed must be non-negative");
  return std::clamp(model.base(snr_db) + model.k_mobility * speed_mps, 0.0, 1.0);
}

}  // namespace beamroam
