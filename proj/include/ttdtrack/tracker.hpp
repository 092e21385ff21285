// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ttdtrack/codebook.hpp"
#include "ttdtrack/pairing_config.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

/// Which pairing each timeslot uses.
enum class PairingPolicy {
  forward_backward,  // backward when the slot center is >= 0, forward otherwise
  forward_only,
};

struct SlotPlan {
  int index = 0;  // 0-based timeslot
  double theta0 = 0.0;
  double alpha = 0.0;
  PairingConfig pairing;
};

/// Split of [theta0 - alpha, theta0 + alpha] into L fractions, one pilot timeslot each.
struct TrackingPlan {
  SystemConfig cfg;
  double theta0 = 0.0;
  double alpha = 0.0;
  std::vector<SlotPlan> slots;
  /// Applied to every analog precoder so that ||f|| = 1.
  double precoder_scale = 1.0;
  /// True when any slot radius exceeds the bound of its pairing.
  bool exceeds_bound = false;

  [[nodiscard]] int slot_count() const { return static_cast<int>(slots.size()); }
};

/// Slot l (0-based) is centered at theta0 - alpha + (2l + 1) alpha / L with radius alpha / L.
/// Pairings are snapped to `codebook` when one is given.
/// Throws DomainError when |theta0| + alpha > 1 or slots < 1.
TrackingPlan plan_tracking(double theta0, double alpha, int slots, const SystemConfig& cfg,
                           const JointCodebook* codebook = nullptr,
                           PairingPolicy policy = PairingPolicy::forward_backward);

/// Same fractions, but each slot points every subcarrier at its center (psi = t = center).
TrackingPlan plan_sweep(double theta0, double alpha, int slots, const SystemConfig& cfg,
                        const JointCodebook* codebook = nullptr);

/// Received pilots: y(l, m + M) for slot l and subcarrier m.
struct TrackingObservation {
  SystemConfig cfg;
  Eigen::MatrixXcd y;
  std::vector<PairingConfig> pairings;
  double precoder_scale = 1.0;

  [[nodiscard]] int slot_count() const { return static_cast<int>(y.rows()); }
  [[nodiscard]] int m_half() const { return cfg.m_half; }
};

/// Pilots of value 1 sent through every (slot, subcarrier) precoder. Slot l draws its noise
/// from the substream (seed, l). Throws DimensionError when the channel does not fit the plan.
TrackingObservation run_tracking(const TrackingPlan& plan, const ChannelResponse& channel, double noise_std,
                                 std::uint64_t seed);

struct BeamIndex {
  int l = 0;  // 0-based slot
  int m = 0;  // subcarrier in [-M, M]

  bool operator==(const BeamIndex&) const = default;
};

/// argmax |y(l, m)|^2, ties to the smaller l and then the smaller m.
BeamIndex select_strongest(const TrackingObservation& obs);

/// Slot with the largest received energy summed over subcarriers; ties to the smaller l.
int select_strongest_slot(const TrackingObservation& obs);

/// angle_map of subcarrier m under the pairing of slot l.
double estimate_angle(const TrackingObservation& obs, int l, int m);

struct RefinedAngle {
  double theta = 0.0;
  double g = 0.0;
  Eigen::VectorXd taus;
};

struct TrackingEstimate {
  int l_hat = 0;
  int m_hat = 0;
  double theta_hat = 0.0;
  std::optional<RefinedAngle> refined;

  [[nodiscard]] double best_theta() const { return refined ? refined->theta : theta_hat; }
};

/// Strongest beam and its angle.
TrackingEstimate coarse_estimate(const TrackingObservation& obs);

/// Every angle_map(m, slot l) in storage order, row l holding slot l.
Eigen::MatrixXd search_angles(const TrackingPlan& plan);

/// Writes the |Y| heatmap: header "slot,m=-M,...,m=M", one row per slot.
void write_observation_csv(std::ostream& out, const TrackingObservation& obs);

}  // namespace ttdtrack
