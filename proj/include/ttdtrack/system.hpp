// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ttdtrack {

/// Array, RF chain and OFDM parameters of a TTD-aided hybrid beamformer.
///
/// The array has `n_bs` antennas split into `n_ttd` groups of `p` phase shifters,
/// each group fed by one true-time-delay line. The band holds 2M+1 subcarriers
/// f_m = f_c + m f_d, m = -M..M, with f_d = bandwidth / (2M) where `bandwidth`
/// is the full two-sided bandwidth.
struct SystemConfig {
  int n_bs = 256;
  int n_ttd = 16;
  int p = 16;
  double f_c = 100e9;
  double bandwidth = 10e9;
  int m_half = 64;
  double f_d = 10e9 / 128.0;

  /// Builds a configuration with the subcarrier spacing derived from the bandwidth.
  /// Throws std::invalid_argument if the result violates an invariant.
  static SystemConfig make(int n_bs, int n_ttd, int p, double f_c, double bandwidth, int m_half);

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  [[nodiscard]] int subcarrier_count() const { return 2 * m_half + 1; }
  [[nodiscard]] double frequency(int m) const { return f_c + m * f_d; }
  [[nodiscard]] double baseband(int m) const { return m * f_d; }
  [[nodiscard]] double lowest_frequency() const { return frequency(-m_half); }
  [[nodiscard]] double highest_frequency() const { return frequency(m_half); }
  /// M f_d / f_c, the fractional half-bandwidth that drives the beam squint.
  [[nodiscard]] double squint_ratio() const { return m_half * f_d / f_c; }

  bool operator==(const SystemConfig&) const = default;
};

/// The 256-antenna, 16x16 TTD, 100 GHz, 10 GHz, M = 64 reference system.
SystemConfig reference_system();

/// Ordered subcarrier frequencies of a system, indexed by m in [-M, M].
class SubcarrierGrid {
 public:
  explicit SubcarrierGrid(const SystemConfig& cfg);

  [[nodiscard]] int m_half() const { return m_half_; }
  [[nodiscard]] std::size_t size() const { return frequencies_.size(); }
  [[nodiscard]] double frequency(int m) const { return frequencies_[index(m)]; }
  [[nodiscard]] double baseband(int m) const { return baseband_[index(m)]; }
  [[nodiscard]] std::span<const double> frequencies() const { return frequencies_; }
  [[nodiscard]] std::span<const double> baseband() const { return baseband_; }

  /// Position of subcarrier m in the storage order; throws DomainError when |m| > M.
  [[nodiscard]] std::size_t index(int m) const;
  [[nodiscard]] int subcarrier(std::size_t index) const { return static_cast<int>(index) - m_half_; }

 private:
  int m_half_;
  std::vector<double> frequencies_;
  std::vector<double> baseband_;
};

}  // namespace ttdtrack
