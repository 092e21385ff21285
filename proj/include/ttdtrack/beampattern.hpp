// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "ttdtrack/pairing_config.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

/// Normalized Dirichlet kernel |sin(N pi a / 2)| / (N |sin(pi a / 2)|), equal to 1 at a in 2Z.
double dirichlet(int n, double a);

/// Normalized array gain |a(f_m, theta)^H f_m| / N_BS in closed form:
/// Xi_P(f_m/f_c theta - psi) * Xi_{N_TTD}(P (f_m/f_c theta - psi - f_m^b/f_c t)).
double array_gain(double f_m, double theta, const PrecoderConfig& pc, const SystemConfig& cfg);

/// Period, mainlobe semi-width and peak of the window factor Xi_P (suffix 1) and of the
/// beam factor Xi_{N_TTD} (suffix 2) as functions of theta.
struct LobeGeometry {
  double t1 = 0.0;
  double w1 = 0.0;
  double theta_c1 = 0.0;
  double t2 = 0.0;
  double w2 = 0.0;
  double theta_c2 = 0.0;
};

LobeGeometry lobe_geometry(double f_m, const PrecoderConfig& pc, const SystemConfig& cfg);

/// Direction of strongest gain at subcarrier m: (f_c/f_m) psi + (f_m^b/f_m) t.
double angle_map(int m, const PrecoderConfig& pc, const SystemConfig& cfg);

/// Brute-force per-subcarrier argmax of array_gain over theta in [-1, 1].
struct PeakMap {
  double grid_step = 0.0;
  std::vector<int> subcarriers;
  std::vector<double> theta;
  std::vector<double> gain;
};

/// Samples theta = -1 + i * grid_step; ties go to the smallest theta.
PeakMap peak_map(const PrecoderConfig& pc, const SystemConfig& cfg, double grid_step = 1e-4);

/// Periodic sidelobes of the window factor at f_{-M} and f_M, and the all-band peak theta_c,
/// for a backward pairing.
struct SidelobeLocations {
  double theta_side_minus = 0.0;
  double theta_side_plus = 0.0;
  double theta_c = 0.0;
};

/// Throws std::invalid_argument unless pairing.mode is backward.
SidelobeLocations sidelobe_locations(const PairingConfig& pairing, const SystemConfig& cfg);

/// Writes "m,f_m,theta,gain" rows for every `subcarrier_stride`-th subcarrier on a theta grid.
void write_gain_surface_csv(std::ostream& out, const PrecoderConfig& pc, const SystemConfig& cfg, double theta_step,
                            int subcarrier_stride = 1);

/// Writes "m,f_m,theta,gain,angle_map" rows of a peak map.
void write_peak_map_csv(std::ostream& out, const PeakMap& map, const PrecoderConfig& pc, const SystemConfig& cfg);

}  // namespace ttdtrack
