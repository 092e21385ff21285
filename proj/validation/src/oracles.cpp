// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/validation/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ttdtrack::oracle {

namespace {
constexpr std::complex<double> kJ{0.0, 1.0};
}

std::complex<double> precoder_entry(int n, double psi, double t_aux, double f_m, const SystemConfig& cfg) {
  const double pi = std::numbers::pi;
  const int q = n / cfg.p;
  const double fb = f_m - cfg.f_c;
  return std::exp(-kJ * pi * static_cast<double>(n) * psi) *
         std::exp(-kJ * pi * (fb / cfg.f_c) * static_cast<double>(cfg.p * q) * t_aux);
}

double inner_product_gain(double f_m, double theta, double psi, double t_aux, const SystemConfig& cfg) {
  const double pi = std::numbers::pi;
  std::complex<double> acc{0.0, 0.0};
  for (int n = 0; n < cfg.n_bs; ++n) {
    const std::complex<double> a = std::exp(-kJ * pi * (f_m / cfg.f_c) * static_cast<double>(n) * theta);
    acc += std::conj(a) * precoder_entry(n, psi, t_aux, f_m, cfg);
  }
  return std::abs(acc) / cfg.n_bs;
}

Eigen::VectorXcd model_vector(const CprProblem& prob, int i, double theta) {
  const double pi = std::numbers::pi;
  const auto& cfg = prob.cfg;
  const double f_m = cfg.f_c + (i - cfg.m_half) * cfg.f_d;
  Eigen::VectorXcd v(prob.slot_count());
  for (int l = 0; l < prob.slot_count(); ++l) {
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n < cfg.n_bs; ++n) {
      const std::complex<double> b =
          prob.precoder_scale * precoder_entry(n, prob.pairings[l].psi, prob.pairings[l].t_aux, f_m, cfg);
      const std::complex<double> a = std::exp(-kJ * pi * (f_m / cfg.f_c) * static_cast<double>(n) * theta);
      acc += std::conj(b) * a;
    }
    v[l] = acc;
  }
  return v;
}

double finite_difference_gradient(const CprProblem& prob, const CprState& state, double step) {
  const double up = objective(prob, state.theta + step, state.g, state.taus);
  const double down = objective(prob, state.theta - step, state.g, state.taus);
  return (up - down) / (2.0 * step);
}

double nearest_by_scan(double value, const std::vector<double>& values) {
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_dist = std::numeric_limits<double>::infinity();
  for (double v : values) {
    const double d = std::abs(v - value);
    if (d < best_dist || (d == best_dist && v < best)) {
      best = v;
      best_dist = d;
    }
  }
  return best;
}

double theorem1_from_frequencies(double theta0, double f_c, double mfd, int p) {
  const double a = std::abs(theta0);
  const double first = 1.620 / p + (mfd / f_c) * a;
  const double second = 2.0 / p + mfd * mfd / (p * (f_c * f_c - mfd * mfd)) + (mfd / (2.0 * f_c)) * a;
  return std::min(first, second);
}

double beamforming_gain(const ChannelResponse& channel, double theta_hat, const SystemConfig& cfg) {
  double total = 0.0;
  for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
    const double f_m = cfg.f_c + m * cfg.f_d;
    const auto& h = channel.at(m);
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n < cfg.n_bs; ++n) acc += std::conj(h[n]) * precoder_entry(n, theta_hat, theta_hat, f_m, cfg);
    total += std::norm(acc) / cfg.n_bs;
  }
  return total / cfg.subcarrier_count();
}

}  // namespace ttdtrack::oracle
