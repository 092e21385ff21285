// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/tracker.hpp"

#include <cmath>
#include <ostream>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/format.hpp"
#include "ttdtrack/pairing.hpp"

namespace ttdtrack {

namespace {

constexpr double kRangeTol = 1e-12;

TrackingPlan make_plan_skeleton(double theta0, double alpha, int slots, const SystemConfig& cfg) {
  cfg.validate();
  if (slots < 1) throw DomainError("at least one timeslot is required");
  if (!(alpha > 0.0)) throw DomainError("searching radius must be positive");
  if (std::abs(theta0) + alpha > 1.0 + kRangeTol) throw DomainError("|theta0| + alpha exceeds 1");
  TrackingPlan plan;
  plan.cfg = cfg;
  plan.theta0 = theta0;
  plan.alpha = alpha;
  plan.precoder_scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_bs));
  plan.slots.reserve(slots);
  const double radius = alpha / slots;
  for (int l = 0; l < slots; ++l) {
    SlotPlan slot;
    slot.index = l;
    slot.theta0 = theta0 - alpha + (2.0 * l + 1.0) * radius;
    slot.alpha = radius;
    plan.slots.push_back(slot);
  }
  return plan;
}

}  // namespace

TrackingPlan plan_tracking(double theta0, double alpha, int slots, const SystemConfig& cfg,
                           const JointCodebook* codebook, PairingPolicy policy) {
  TrackingPlan plan = make_plan_skeleton(theta0, alpha, slots, cfg);
  for (auto& slot : plan.slots) {
    if (policy == PairingPolicy::forward_only) {
      slot.pairing = make_forward_pairing(slot.theta0, slot.alpha, cfg);
    } else {
      slot.pairing = make_pairing(slot.theta0, slot.alpha, cfg);
    }
    if (codebook != nullptr) slot.pairing = quantized_pairing(slot.pairing, *codebook);
    plan.exceeds_bound = plan.exceeds_bound || slot.pairing.exceeds_bound;
  }
  return plan;
}

TrackingPlan plan_sweep(double theta0, double alpha, int slots, const SystemConfig& cfg,
                        const JointCodebook* codebook) {
  TrackingPlan plan = make_plan_skeleton(theta0, alpha, slots, cfg);
  for (auto& slot : plan.slots) {
    slot.pairing = make_aligned_pairing(slot.theta0, slot.alpha, cfg);
    if (codebook != nullptr) slot.pairing = quantized_pairing(slot.pairing, *codebook);
  }
  return plan;
}

TrackingObservation run_tracking(const TrackingPlan& plan, const ChannelResponse& channel, double noise_std,
                                 std::uint64_t seed) {
  const auto& cfg = plan.cfg;
  if (channel.m_half != cfg.m_half || static_cast<int>(channel.subcarrier_count()) != cfg.subcarrier_count()) {
    throw DimensionError("channel subcarriers do not match the tracking plan");
  }
  TrackingObservation obs;
  obs.cfg = cfg;
  obs.precoder_scale = plan.precoder_scale;
  obs.y.resize(plan.slot_count(), cfg.subcarrier_count());
  obs.pairings.reserve(plan.slots.size());
  for (const auto& slot : plan.slots) {
    obs.pairings.push_back(slot.pairing);
    auto rng = make_rng(seed, {static_cast<std::uint64_t>(slot.index)});
    const PrecoderConfig pc = slot.pairing.precoder();
    for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
      const cvec f = assemble_precoder(pc, cfg.frequency(m), cfg) * plan.precoder_scale;
      obs.y(slot.index, m + cfg.m_half) = simulate_rx(channel.at(m), f, {1.0, 0.0}, noise_std, rng);
    }
  }
  return obs;
}

BeamIndex select_strongest(const TrackingObservation& obs) {
  if (obs.y.size() == 0) throw DimensionError("empty observation");
  BeamIndex best{0, -obs.m_half()};
  double best_power = -1.0;
  // Row-major scan with a strict comparison keeps the first maximum in (l, m) order.
  for (Eigen::Index l = 0; l < obs.y.rows(); ++l) {
    for (Eigen::Index i = 0; i < obs.y.cols(); ++i) {
      const double power = std::norm(obs.y(l, i));
      if (power > best_power) {
        best_power = power;
        best = {static_cast<int>(l), static_cast<int>(i) - obs.m_half()};
      }
    }
  }
  return best;
}

int select_strongest_slot(const TrackingObservation& obs) {
  if (obs.y.size() == 0) throw DimensionError("empty observation");
  int best = 0;
  double best_energy = -1.0;
  for (Eigen::Index l = 0; l < obs.y.rows(); ++l) {
    const double energy = obs.y.row(l).squaredNorm();
    if (energy > best_energy) {
      best_energy = energy;
      best = static_cast<int>(l);
    }
  }
  return best;
}

double estimate_angle(const TrackingObservation& obs, int l, int m) {
  if (l < 0 || l >= obs.slot_count()) throw DomainError("slot index out of range");
  return angle_map(m, obs.pairings[static_cast<std::size_t>(l)].precoder(), obs.cfg);
}

TrackingEstimate coarse_estimate(const TrackingObservation& obs) {
  const BeamIndex idx = select_strongest(obs);
  TrackingEstimate est;
  est.l_hat = idx.l;
  est.m_hat = idx.m;
  est.theta_hat = estimate_angle(obs, idx.l, idx.m);
  return est;
}

Eigen::MatrixXd search_angles(const TrackingPlan& plan) {
  const auto& cfg = plan.cfg;
  Eigen::MatrixXd angles(plan.slot_count(), cfg.subcarrier_count());
  for (const auto& slot : plan.slots) {
    const PrecoderConfig pc = slot.pairing.precoder();
    for (int m = -cfg.m_half; m <= cfg.m_half; ++m) angles(slot.index, m + cfg.m_half) = angle_map(m, pc, cfg);
  }
  return angles;
}

void write_observation_csv(std::ostream& out, const TrackingObservation& obs) {
  out << "slot";
  for (int m = -obs.m_half(); m <= obs.m_half(); ++m) out << ",m=" << m;
  out << '\n';
  for (Eigen::Index l = 0; l < obs.y.rows(); ++l) {
    out << l;
    for (Eigen::Index i = 0; i < obs.y.cols(); ++i) out << ',' << fmt_real(std::abs(obs.y(l, i)));
    out << '\n';
  }
}

}  // namespace ttdtrack
