// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/errors.hpp"

namespace ttdtrack {

namespace {

void check_pairing_args(double theta0, double alpha) {
  if (!(std::abs(theta0) <= 1.0)) throw DomainError("central angle must lie in [-1, 1]");
  if (!(alpha > 0.0)) throw DomainError("searching radius must be positive");
}

}  // namespace

PairingConfig make_forward_pairing(double theta0, double alpha, const SystemConfig& cfg) {
  check_pairing_args(theta0, alpha);
  const double r = cfg.squint_ratio();
  PairingConfig pc;
  pc.mode = PairingMode::forward;
  pc.theta0 = theta0;
  pc.alpha = alpha;
  pc.psi = theta0 + r * alpha;
  pc.t_aux = theta0 + alpha / r;
  pc.exceeds_bound = alpha >= forward_bound(theta0, cfg);
  return pc;
}

PairingConfig make_backward_pairing(double theta0, double alpha, const SystemConfig& cfg) {
  check_pairing_args(theta0, alpha);
  const double r = cfg.squint_ratio();
  PairingConfig pc;
  pc.mode = PairingMode::backward;
  pc.theta0 = theta0;
  pc.alpha = alpha;
  pc.psi = theta0 - r * alpha;
  pc.t_aux = theta0 - alpha / r;
  pc.exceeds_bound = alpha >= std::max(backward_bound(theta0, cfg), theorem1_bound(theta0, cfg));
  return pc;
}

PairingConfig make_aligned_pairing(double theta0, double alpha, const SystemConfig&) {
  check_pairing_args(theta0, alpha);
  PairingConfig pc;
  pc.mode = PairingMode::aligned;
  pc.theta0 = theta0;
  pc.alpha = alpha;
  pc.psi = theta0;
  pc.t_aux = theta0;
  return pc;
}

PairingConfig make_pairing(double theta0, double alpha, const SystemConfig& cfg) {
  auto pc = theta0 >= 0.0 ? make_backward_pairing(theta0, alpha, cfg) : make_forward_pairing(theta0, alpha, cfg);
  pc.exceeds_bound = alpha > theorem1_bound(theta0, cfg);
  return pc;
}

double forward_bound(double theta0, const SystemConfig& cfg) { return 1.0 / cfg.p - cfg.squint_ratio() * theta0; }

double backward_bound(double theta0, const SystemConfig& cfg) { return 1.0 / cfg.p + cfg.squint_ratio() * theta0; }

double fb_bound(double theta0, const SystemConfig& cfg) {
  return std::max(forward_bound(theta0, cfg), backward_bound(theta0, cfg));
}

double forward_single_slot_bound(const SystemConfig& cfg) { return cfg.f_c / (cfg.highest_frequency() * cfg.p); }

double theorem1_bound(double theta0, const SystemConfig& cfg) {
  const double r = cfg.squint_ratio();
  const double p = cfg.p;
  const double a = std::abs(theta0);
  const double inter_fraction = 1.620 / p + r * a;
  const double intra_fraction = 2.0 / p + r * r / (p * (1.0 - r * r)) + 0.5 * r * a;
  return std::min(inter_fraction, intra_fraction);
}

double fixed_radius(const SystemConfig& cfg) { return 1.0 / cfg.p; }

double quasi_fixed_radius(double theta0, const SystemConfig& cfg, const QuasiFixedOptions& opts) {
  const double a = std::abs(theta0);
  const double p = cfg.p;
  if (a < opts.threshold_low) return 1.0 / p;
  if (a <= opts.threshold_high) return 1.620 / p;
  double radius = 2.0 / p;
  if (opts.include_outer_term) {
    const double mfd = cfg.m_half * cfg.f_d;
    radius += mfd * mfd / (p * cfg.lowest_frequency() * cfg.highest_frequency());
  }
  return radius;
}

RadiusBounds radius_bounds(double theta0, const SystemConfig& cfg, const QuasiFixedOptions& opts) {
  RadiusBounds b;
  b.forward = forward_bound(theta0, cfg);
  b.forward_single_slot = forward_single_slot_bound(cfg);
  b.backward = backward_bound(theta0, cfg);
  b.fb = fb_bound(theta0, cfg);
  b.theorem1 = theorem1_bound(theta0, cfg);
  b.fixed = fixed_radius(cfg);
  b.quasi_fixed = quasi_fixed_radius(theta0, cfg, opts);
  return b;
}

double window_sidelobe_level(int p) {
  if (p <= 1) return 0.0;  // Xi_1 == 1 has no sidelobes
  static std::mutex mutex;
  static std::map<int, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
  }
  // Xi_P is even and symmetric about a = 1, so the sidelobes live in [2/P, 1].
  const double lo = 2.0 / p;
  const double hi = 1.0;
  constexpr int samples = 200000;
  const double step = (hi - lo) / samples;
  double best = 0.0;
  double best_a = lo;
  for (int i = 0; i <= samples; ++i) {
    const double a = lo + i * step;
    const double v = dirichlet(p, a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  // golden-section polish around the sampled peak
  double a = std::max(lo, best_a - step);
  double b = std::min(hi, best_a + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double c = b - inv_phi * (b - a);
    const double d = a + inv_phi * (b - a);
    if (dirichlet(p, c) > dirichlet(p, d)) {
      b = d;
    } else {
      a = c;
    }
  }
  best = std::max(best, dirichlet(p, 0.5 * (a + b)));
  std::lock_guard lock(mutex);
  cache.emplace(p, best);
  return best;
}

double window_mainlobe_inverse(int p, double level) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("level must lie in (0, 1]");
  if (level == 1.0) return 0.0;
  // Xi_P decreases monotonically from 1 to 0 on [0, 2/P].
  double lo = 0.0;
  double hi = 2.0 / p;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dirichlet(p, mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double sidelobe_mainlobe_frequency(const PairingConfig& pairing, const SystemConfig& cfg) {
  if (!(pairing.alpha > 0.0)) throw DomainError("sidelobe_mainlobe_frequency requires alpha > 0");
  const double f_lo = cfg.lowest_frequency();
  const double f_hi = cfg.highest_frequency();
  const double p = cfg.p;
  const double mfd = cfg.m_half * cfg.f_d;
  return p * f_lo * f_hi * f_hi / (p * f_lo * f_hi + 2.0 * mfd * cfg.f_c / pairing.alpha);
}

bool inter_fraction_ok(const PairingConfig& pairing, const SystemConfig& cfg) {
  // Window argument of the strongest beam at f_M is r t; for a backward pairing this is
  // r theta0 - alpha, and the forward case mirrors it.
  const double arg = cfg.squint_ratio() * pairing.t_aux;
  return dirichlet(cfg.p, arg) > window_sidelobe_level(cfg.p);
}

double bf_codebook_radius(double theta0, const SystemConfig& cfg) {
  return cfg.squint_ratio() * (1.0 + std::abs(theta0));
}

double bf_codebook_fixed_radius(const SystemConfig& cfg) { return cfg.squint_ratio(); }

}  // namespace ttdtrack
