// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ttdtrack/pairing_config.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

// Subcarrier-angle pairings and the closed-form bounds on their searching radius.
//
// With r = M f_d / f_c:
//   forward   psi = theta0 + r alpha,  t = theta0 + alpha / r
//   backward  psi = theta0 - r alpha,  t = theta0 - alpha / r
// Both place the strongest beam of f_{-M} and f_M on the two ends of
// [theta0 - alpha, theta0 + alpha].

PairingConfig make_forward_pairing(double theta0, double alpha, const SystemConfig& cfg);
PairingConfig make_backward_pairing(double theta0, double alpha, const SystemConfig& cfg);
/// psi = t = theta0: every subcarrier beamforms towards theta0.
PairingConfig make_aligned_pairing(double theta0, double alpha, const SystemConfig& cfg);

/// Backward pairing when theta0 >= 0, forward otherwise. Flags radii above theorem1_bound.
/// Throws DomainError unless |theta0| <= 1 and alpha > 0.
PairingConfig make_pairing(double theta0, double alpha, const SystemConfig& cfg);

/// 1/P - r theta0
double forward_bound(double theta0, const SystemConfig& cfg);
/// 1/P + r theta0
double backward_bound(double theta0, const SystemConfig& cfg);
/// max(forward, backward) = 1/P + r |theta0|
double fb_bound(double theta0, const SystemConfig& cfg);
/// f_c / (f_M P): single-slot forward radius when beam periods clear the interval.
double forward_single_slot_bound(const SystemConfig& cfg);

/// min{1.620/P + r|theta0|, 2/P + r^2 / (P (1 - r^2)) + (r/2)|theta0|}, aimed at large |theta0|.
double theorem1_bound(double theta0, const SystemConfig& cfg);

/// Angle-independent radius 1/P.
double fixed_radius(const SystemConfig& cfg);

struct QuasiFixedOptions {
  double threshold_low = 0.5;
  double threshold_high = 0.866;
  /// Adds M^2 f_d^2 / (P f_{-M} f_M) on the outer branch.
  bool include_outer_term = false;
};

/// Step function 1/P, 1.620/P, 2/P over |theta0| split at the two thresholds.
/// |theta0| < low selects the first branch, |theta0| > high the last.
double quasi_fixed_radius(double theta0, const SystemConfig& cfg, const QuasiFixedOptions& opts = {});

struct RadiusBounds {
  double forward = 0.0;
  double forward_single_slot = 0.0;
  double backward = 0.0;
  double fb = 0.0;
  double theorem1 = 0.0;
  double fixed = 0.0;
  double quasi_fixed = 0.0;
};

RadiusBounds radius_bounds(double theta0, const SystemConfig& cfg, const QuasiFixedOptions& opts = {});

/// Largest sidelobe of Xi_P outside its mainlobe, found numerically.
double window_sidelobe_level(int p);

/// Positive a inside the mainlobe of Xi_P with Xi_P(a) = level, for level in (0, 1].
double window_mainlobe_inverse(int p, double level);

/// Frequency f' whose mainlobe lands on the f_M sidelobe of a backward pairing:
/// P f_{-M} f_M^2 / (P f_{-M} f_M + 2 M f_d f_c / alpha). Throws DomainError when alpha <= 0.
double sidelobe_mainlobe_frequency(const PairingConfig& pairing, const SystemConfig& cfg);

/// Whether Xi_P(r theta0 - alpha) stays above the window's maximum sidelobe level, i.e. the
/// band-edge beams outrank window sidelobes leaking in from neighbouring fractions.
bool inter_fraction_ok(const PairingConfig& pairing, const SystemConfig& cfg);

/// Radius reachable with the beamforming-only codebook (|t| <= 1): r (1 + |theta0|).
double bf_codebook_radius(double theta0, const SystemConfig& cfg);
/// Angle-independent version of bf_codebook_radius: r.
double bf_codebook_fixed_radius(const SystemConfig& cfg);

}  // namespace ttdtrack
