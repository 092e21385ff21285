// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ttdtrack/random.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// One ray of the line-of-sight channel.
struct PathComponent {
  std::complex<double> gain{1.0, 0.0};
  double direction = 0.0;  // spatial direction in [-1, 1]
  double delay = 0.0;      // tau0 in seconds, >= 0

  void validate() const;
};

/// Frequency-domain channel vectors h_m (length N_BS) for m = -M..M.
struct ChannelResponse {
  int m_half = 0;
  std::vector<cvec> per_subcarrier;

  [[nodiscard]] const cvec& at(int m) const;
  [[nodiscard]] std::size_t subcarrier_count() const { return per_subcarrier.size(); }
};

/// Physical phase-shifter phases phi (per antenna, in units of pi) and TTD delays in seconds.
struct PhysicalPrecoder {
  Eigen::VectorXd phases;
  Eigen::VectorXd delays;
};

/// Equivalent-model precoder: phase slope psi per antenna plus auxiliary delay slope t per TTD.
///
/// The physical network applies e^{-j pi phi_n} on antenna n and e^{-j 2 pi f_m t_hat_q}
/// on TTD line q. Folding the carrier part of each delay into the phase shifters gives
/// psi_vec = phi + (t_vec (x) 1_P) with t_vec = 2 f_c t_hat, which only leaves the
/// baseband part e^{-j pi (f_m^b / f_c) t_q} on the delay lines.
struct PrecoderConfig {
  double psi = 0.0;
  double t_aux = 0.0;

  /// [0, psi, ..., (N_BS - 1) psi]
  [[nodiscard]] Eigen::VectorXd psi_vector(const SystemConfig& cfg) const;
  /// P [0, t, ..., (N_TTD - 1) t]
  [[nodiscard]] Eigen::VectorXd delay_vector(const SystemConfig& cfg) const;
  [[nodiscard]] PhysicalPrecoder to_physical(const SystemConfig& cfg) const;
};

/// Inverse of PrecoderConfig::to_physical, returning (psi_vec, t_vec).
struct EquivalentVectors {
  Eigen::VectorXd psi_vec;
  Eigen::VectorXd t_vec;
};
EquivalentVectors to_equivalent(const PhysicalPrecoder& phys, const SystemConfig& cfg);

/// a_n(f_m, psi): entry k is exp(-j pi (f_m / f_c) k psi).
cvec steering_vector(double f_m, double f_c, double psi, int n);

/// h_m = sum over paths of g exp(-j 2 pi f_m^b tau0) a(f_m, psi).
ChannelResponse channel_response(const PathComponent& path, const SubcarrierGrid& grid, const SystemConfig& cfg);
ChannelResponse channel_response(const std::vector<PathComponent>& paths, const SubcarrierGrid& grid,
                                 const SystemConfig& cfg);

/// Unit-modulus analog precoder at frequency f_m from the equivalent model.
cvec assemble_precoder(const PrecoderConfig& pc, double f_m, const SystemConfig& cfg);

/// The same precoder computed from physical phases and delays: PS o (TTD (x) 1_P).
cvec assemble_physical_precoder(const PhysicalPrecoder& phys, double f_m, const SystemConfig& cfg);

/// y = h^H f * pilot + n with n ~ CN(0, noise_std^2). Throws DimensionError on length mismatch.
std::complex<double> simulate_rx(const cvec& h, const cvec& f, std::complex<double> pilot, double noise_std, Rng& rng);
std::complex<double> simulate_rx(const cvec& h, const cvec& f, std::complex<double> pilot, double noise_std,
                                 std::uint64_t seed);

}  // namespace ttdtrack
