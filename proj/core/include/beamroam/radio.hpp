#pragma once

#include <cstdint>
#include <vector>

#include "beamroam/geometry.hpp"

namespace beamroam {

/// Two-level lobe: flat main lobe of width beamwidth_deg around boresight,
/// flat back lobe elsewhere. The omni variant radiates omni_gain_db at every
/// angle.
struct AntennaPattern {
  double boresight_gain_db = 9.0;
  double beamwidth_deg = 60.0;
  double back_lobe_db = -10.0;
  bool omnidirectional = false;
  double omni_gain_db = 0.0;

  static AntennaPattern omni() {
    AntennaPattern p;
    p.omnidirectional = true;
    return p;
  }

  /// Gain at an off-boresight angle in [0, 180] degrees.
  double gain_db(double off_boresight_deg) const;
  void validate() const;

  bool operator==(const AntennaPattern&) const = default;
};

struct ChannelParams {
  double ref_loss_db = 46.7;
  double path_loss_exponent = 2.2;
  double tx_power_dbm = 20.0;
  double noise_floor_dbm = -90.0;
  double shadowing_sigma_db = 2.0;
  // Edge of the square floor cell that indexes a shadowing draw.
  double shadowing_cell_m = 0.1;
  std::uint64_t seed = 1;

  void validate() const;

  bool operator==(const ChannelParams&) const = default;
};

enum class Bandwidth { k20MHz, k40MHz };

int bandwidth_mhz(Bandwidth bw);
Bandwidth bandwidth_from_mhz(int mhz);

struct RateStep {
  double snr_threshold_db = 0.0;
  double rate_mbps = 0.0;

  bool operator==(const RateStep&) const = default;
};

/// SNR-to-throughput steps per channel width.
struct PhyRateTable {
  std::vector<RateStep> mhz20;
  std::vector<RateStep> mhz40;

  const std::vector<RateStep>& steps(Bandwidth bw) const { return bw == Bandwidth::k20MHz ? mhz20 : mhz40; }
  void validate() const;
  static PhyRateTable defaults();
};

/// Step map from SNR to base loss plus a linear mobility term.
struct LossModel {
  double low_snr_db = 10.0;
  double high_snr_db = 20.0;
  double p_low = 0.30;
  double p_mid = 0.05;
  double p_high = 0.01;
  double k_mobility = 0.005;

  double base(double snr_db) const;
  void validate() const;

  bool operator==(const LossModel&) const = default;
};

double off_boresight_deg(const ApDescriptor& ap, const Vec3& pos);

/// Shadowing draw for (seed, AP, floor cell of pos); zero when sigma is 0.
double shadowing_db(const ChannelParams& channel, int ap_id, const Vec3& pos);

/// Log-distance SNR in dB. Throws kZeroDistance when pos is the AP position.
double snr_at(const ApDescriptor& ap, const AntennaPattern& pattern, const ChannelParams& channel,
              const Vec3& pos);

/// Largest rate whose threshold is <= snr; 0 below the first step.
double phy_rate(const PhyRateTable& table, double snr_db, Bandwidth bw);

/// clamp(base(snr) + k_mobility * speed, 0, 1). Throws on negative speed.
double loss_prob(double snr_db, double speed_mps, const LossModel& model = {});

}  // namespace beamroam
