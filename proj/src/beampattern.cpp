// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/beampattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "ttdtrack/errors.hpp"
#include "ttdtrack/format.hpp"

namespace ttdtrack {

using std::numbers::pi;

std::string_view to_string(PairingMode mode) {
  switch (mode) {
    case PairingMode::forward:
      return "forward";
    case PairingMode::backward:
      return "backward";
    case PairingMode::aligned:
      return "aligned";
  }
  return "unknown";
}

double dirichlet(int n, double a) {
  const double den = std::sin(0.5 * pi * a);
  if (std::abs(den) < 1e-12) return 1.0;
  const double value = std::abs(std::sin(0.5 * n * pi * a)) / (n * std::abs(den));
  return std::min(value, 1.0);
}

double array_gain(double f_m, double theta, const PrecoderConfig& pc, const SystemConfig& cfg) {
  const double x = (f_m / cfg.f_c) * theta - pc.psi;
  const double baseband_ratio = (f_m - cfg.f_c) / cfg.f_c;
  return dirichlet(cfg.p, x) * dirichlet(cfg.n_ttd, cfg.p * (x - baseband_ratio * pc.t_aux));
}

LobeGeometry lobe_geometry(double f_m, const PrecoderConfig& pc, const SystemConfig& cfg) {
  if (!(f_m > 0.0)) throw DomainError("lobe_geometry requires f_m > 0");
  const double ratio = cfg.f_c / f_m;
  const double f_b = f_m - cfg.f_c;
  LobeGeometry g;
  g.t1 = 2.0 * ratio;
  g.w1 = 2.0 * ratio / cfg.p;
  g.theta_c1 = ratio * pc.psi;
  g.t2 = 2.0 * ratio / cfg.p;
  g.w2 = 2.0 * ratio / cfg.n_bs;
  g.theta_c2 = ratio * pc.psi + (f_b / f_m) * pc.t_aux;
  return g;
}

double angle_map(int m, const PrecoderConfig& pc, const SystemConfig& cfg) {
  if (m < -cfg.m_half || m > cfg.m_half) throw DomainError("subcarrier index outside [-M, M]");
  const double f_m = cfg.frequency(m);
  return (cfg.f_c / f_m) * pc.psi + (cfg.baseband(m) / f_m) * pc.t_aux;
}

PeakMap peak_map(const PrecoderConfig& pc, const SystemConfig& cfg, double grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("peak_map grid_step must be positive");
  const auto points = static_cast<long>(std::floor(2.0 / grid_step + 1e-9)) + 1;
  PeakMap map;
  map.grid_step = grid_step;
  for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
    const double f_m = cfg.frequency(m);
    double best_theta = -1.0;
    double best_gain = -1.0;
    for (long i = 0; i < points; ++i) {
      const double theta = -1.0 + static_cast<double>(i) * grid_step;
      const double g = array_gain(f_m, theta, pc, cfg);
      if (g > best_gain) {
        best_gain = g;
        best_theta = theta;
      }
    }
    map.subcarriers.push_back(m);
    map.theta.push_back(best_theta);
    map.gain.push_back(best_gain);
  }
  return map;
}

SidelobeLocations sidelobe_locations(const PairingConfig& pairing, const SystemConfig& cfg) {
  if (pairing.mode != PairingMode::backward) {
    throw std::invalid_argument("sidelobe_locations requires a backward pairing");
  }
  const double f_lo = cfg.lowest_frequency();
  const double f_hi = cfg.highest_frequency();
  SidelobeLocations s;
  s.theta_side_minus = pairing.theta0 + pairing.alpha - 2.0 * cfg.f_c / (cfg.p * f_lo);
  s.theta_side_plus = pairing.theta0 - pairing.alpha + 2.0 * cfg.f_c / (cfg.p * f_hi);
  s.theta_c = pairing.theta0 - cfg.squint_ratio() * pairing.alpha;
  return s;
}

void write_gain_surface_csv(std::ostream& out, const PrecoderConfig& pc, const SystemConfig& cfg, double theta_step,
                            int subcarrier_stride) {
  if (!(theta_step > 0.0)) throw DomainError("theta_step must be positive");
  subcarrier_stride = std::max(1, subcarrier_stride);
  const auto points = static_cast<long>(std::floor(2.0 / theta_step + 1e-9)) + 1;
  out << "m,f_m,theta,gain\n";
  for (int m = -cfg.m_half; m <= cfg.m_half; m += subcarrier_stride) {
    const double f_m = cfg.frequency(m);
    for (long i = 0; i < points; ++i) {
      const double theta = -1.0 + static_cast<double>(i) * theta_step;
      out << m << ',' << fmt_real(f_m) << ',' << fmt_real(theta) << ','
          << fmt_real(array_gain(f_m, theta, pc, cfg)) << '\n';
    }
  }
}

void write_peak_map_csv(std::ostream& out, const PeakMap& map, const PrecoderConfig& pc, const SystemConfig& cfg) {
  out << "m,f_m,theta,gain,angle_map\n";
  for (std::size_t i = 0; i < map.subcarriers.size(); ++i) {
    const int m = map.subcarriers[i];
    out << m << ',' << fmt_real(cfg.frequency(m)) << ',' << fmt_real(map.theta[i]) << ',' << fmt_real(map.gain[i])
        << ',' << fmt_real(angle_map(m, pc, cfg)) << '\n';
  }
}

}  // namespace ttdtrack
