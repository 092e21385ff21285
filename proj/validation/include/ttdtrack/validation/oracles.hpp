// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ttdtrack/leakage.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/system.hpp"

// Reference implementations written from the model definitions with plain loops and
// std::exp, sharing no code with the library paths they check.
namespace ttdtrack::oracle {

/// |sum_n conj(a_n(theta)) f_n| / N_BS with both vectors built element by element.
double inner_product_gain(double f_m, double theta, double psi, double t_aux, const SystemConfig& cfg);

/// Entry n = qP + p of the analog precoder, from the double-product expansion.
std::complex<double> precoder_entry(int n, double psi, double t_aux, double f_m, const SystemConfig& cfg);

/// B_m^H a_m(theta) with B_m built column by column from precoder_entry.
Eigen::VectorXcd model_vector(const CprProblem& prob, int i, double theta);

/// Central difference of the CPR objective in theta.
double finite_difference_gradient(const CprProblem& prob, const CprState& state, double step);

/// Nearest value by linear scan; ties to the smaller value.
double nearest_by_scan(double value, const std::vector<double>& values);

/// Theorem-style radius written directly in terms of f_c, M f_d and P.
double theorem1_from_frequencies(double theta0, double f_c, double mfd, int p);

/// Mean over subcarriers of |h_m^H f_m|^2 / N_BS with psi = t = theta_hat, by explicit loops.
double beamforming_gain(const ChannelResponse& channel, double theta_hat, const SystemConfig& cfg);

}  // namespace ttdtrack::oracle
