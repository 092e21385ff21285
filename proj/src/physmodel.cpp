// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/physmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ttdtrack/errors.hpp"

namespace ttdtrack {

using std::numbers::pi;

void PathComponent::validate() const {
  if (!(std::abs(direction) <= 1.0)) throw DomainError("path direction must lie in [-1, 1]");
  if (!(delay >= 0.0)) throw DomainError("path delay must be non-negative");
}

const cvec& ChannelResponse::at(int m) const {
  if (m < -m_half || m > m_half) throw DomainError("subcarrier index outside [-M, M]");
  return per_subcarrier[static_cast<std::size_t>(m + m_half)];
}

Eigen::VectorXd PrecoderConfig::psi_vector(const SystemConfig& cfg) const {
  return Eigen::VectorXd::LinSpaced(cfg.n_bs, 0.0, cfg.n_bs - 1.0) * psi;
}

Eigen::VectorXd PrecoderConfig::delay_vector(const SystemConfig& cfg) const {
  return Eigen::VectorXd::LinSpaced(cfg.n_ttd, 0.0, cfg.n_ttd - 1.0) * (cfg.p * t_aux);
}

PhysicalPrecoder PrecoderConfig::to_physical(const SystemConfig& cfg) const {
  const Eigen::VectorXd psi_vec = psi_vector(cfg);
  const Eigen::VectorXd t_vec = delay_vector(cfg);
  PhysicalPrecoder phys;
  phys.phases.resize(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) phys.phases[n] = psi_vec[n] - t_vec[n / cfg.p];
  phys.delays = t_vec / (2.0 * cfg.f_c);
  return phys;
}

EquivalentVectors to_equivalent(const PhysicalPrecoder& phys, const SystemConfig& cfg) {
  if (phys.phases.size() != cfg.n_bs || phys.delays.size() != cfg.n_ttd) {
    throw DimensionError("physical precoder does not match the system configuration");
  }
  EquivalentVectors eq;
  eq.t_vec = phys.delays * (2.0 * cfg.f_c);
  eq.psi_vec.resize(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) eq.psi_vec[n] = phys.phases[n] + eq.t_vec[n / cfg.p];
  return eq;
}

cvec steering_vector(double f_m, double f_c, double psi, int n) {
  cvec a(n);
  const double slope = -pi * (f_m / f_c) * psi;
  for (int k = 0; k < n; ++k) a[k] = std::polar(1.0, slope * k);
  return a;
}

ChannelResponse channel_response(const std::vector<PathComponent>& paths, const SubcarrierGrid& grid,
                                 const SystemConfig& cfg) {
  if (grid.m_half() != cfg.m_half) throw DimensionError("subcarrier grid built for a different system");
  for (const auto& path : paths) path.validate();
  ChannelResponse out;
  out.m_half = cfg.m_half;
  out.per_subcarrier.reserve(grid.size());
  for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
    cvec h = cvec::Zero(cfg.n_bs);
    for (const auto& path : paths) {
      const auto coeff = path.gain * std::polar(1.0, -2.0 * pi * grid.baseband(m) * path.delay);
      h += coeff * steering_vector(grid.frequency(m), cfg.f_c, path.direction, cfg.n_bs);
    }
    out.per_subcarrier.push_back(std::move(h));
  }
  return out;
}

ChannelResponse channel_response(const PathComponent& path, const SubcarrierGrid& grid, const SystemConfig& cfg) {
  return channel_response(std::vector<PathComponent>{path}, grid, cfg);
}

cvec assemble_precoder(const PrecoderConfig& pc, double f_m, const SystemConfig& cfg) {
  // Antenna n = qP + p carries exp(-j pi n psi) exp(-j pi (f_m^b / f_c) P q t), which
  // factors into a per-element part and a per-group part.
  const double baseband_ratio = (f_m - cfg.f_c) / cfg.f_c;
  Eigen::VectorXcd element(cfg.p);
  for (int p = 0; p < cfg.p; ++p) element[p] = std::polar(1.0, -pi * p * pc.psi);
  cvec f(cfg.n_bs);
  for (int q = 0; q < cfg.n_ttd; ++q) {
    const auto group = std::polar(1.0, -pi * q * cfg.p * (pc.psi + baseband_ratio * pc.t_aux));
    f.segment(q * cfg.p, cfg.p) = element * group;
  }
  return f;
}

cvec assemble_physical_precoder(const PhysicalPrecoder& phys, double f_m, const SystemConfig& cfg) {
  if (phys.phases.size() != cfg.n_bs || phys.delays.size() != cfg.n_ttd) {
    throw DimensionError("physical precoder does not match the system configuration");
  }
  cvec f(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) {
    const double ttd_phase = -2.0 * pi * f_m * phys.delays[n / cfg.p];
    f[n] = std::polar(1.0, -pi * phys.phases[n] + ttd_phase);
  }
  return f;
}

std::complex<double> simulate_rx(const cvec& h, const cvec& f, std::complex<double> pilot, double noise_std,
                                 Rng& rng) {
  if (h.size() != f.size()) {
    throw DimensionError("channel length " + std::to_string(h.size()) + " != precoder length " +
                         std::to_string(f.size()));
  }
  if (!(noise_std >= 0.0)) throw DomainError("noise_std must be non-negative");
  // Eigen's dot conjugates the left operand: h.dot(f) = h^H f.
  std::complex<double> y = h.dot(f) * pilot;
  if (noise_std > 0.0) y += complex_gaussian(rng, noise_std);
  return y;
}

std::complex<double> simulate_rx(const cvec& h, const cvec& f, std::complex<double> pilot, double noise_std,
                                 std::uint64_t seed) {
  auto rng = make_rng(seed);
  return simulate_rx(h, f, pilot, noise_std, rng);
}

}  // namespace ttdtrack
