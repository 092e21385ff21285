// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ttdtrack/errors.hpp"

namespace ttdtrack {

SystemConfig SystemConfig::make(int n_bs, int n_ttd, int p, double f_c, double bandwidth, int m_half) {
  SystemConfig cfg;
  cfg.n_bs = n_bs;
  cfg.n_ttd = n_ttd;
  cfg.p = p;
  cfg.f_c = f_c;
  cfg.bandwidth = bandwidth;
  cfg.m_half = m_half;
  cfg.f_d = m_half > 0 ? bandwidth / (2.0 * m_half) : 0.0;
  cfg.validate();
  return cfg;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
  if (n_bs <= 0 || n_ttd <= 0 || p <= 0) fail("n_bs, n_ttd and p must be positive");
  if (n_ttd * p != n_bs) fail("n_ttd * p must equal n_bs");
  if (!(f_c > 0.0) || !(bandwidth > 0.0) || !(f_d > 0.0)) fail("f_c, bandwidth and f_d must be positive");
  if (m_half <= 0) fail("m_half must be positive");
  const double expected = bandwidth / (2.0 * m_half);
  if (std::abs(f_d - expected) > 1e-12 * expected) fail("f_d must equal bandwidth / (2 m_half)");
  if (!(m_half * f_d < f_c)) fail("all subcarrier frequencies must be positive (M f_d < f_c)");
}

SystemConfig reference_system() { return SystemConfig::make(256, 16, 16, 100e9, 10e9, 64); }

SubcarrierGrid::SubcarrierGrid(const SystemConfig& cfg) : m_half_(cfg.m_half) {
  cfg.validate();
  frequencies_.reserve(cfg.subcarrier_count());
  baseband_.reserve(cfg.subcarrier_count());
  for (int m = -m_half_; m <= m_half_; ++m) {
    baseband_.push_back(cfg.baseband(m));
    frequencies_.push_back(cfg.frequency(m));
  }
}

std::size_t SubcarrierGrid::index(int m) const {
  if (m < -m_half_ || m > m_half_) {
    throw DomainError("subcarrier index " + std::to_string(m) + " outside [-M, M]");
  }
  return static_cast<std::size_t>(m + m_half_);
}

}  // namespace ttdtrack
