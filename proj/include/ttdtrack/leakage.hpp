// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/tracker.hpp"

namespace ttdtrack {

/// Leakage compensation by alternating minimization of
///   eps(theta, g, tau) = sum_m || y_m - g e^{j tau_m} B_m^H a_m(theta) ||^2
/// where y_m stacks the L pilots of subcarrier m and B_m = [f_{1,m}, ..., f_{L,m}].
///
/// The receiver observes h^H f = conj(g) a^H f, so y_m holds the conjugated pilots; with that
/// choice the model above is exact for a single path.
struct CprProblem {
  SystemConfig cfg;
  std::vector<PairingConfig> pairings;
  double precoder_scale = 1.0;
  /// y_hat[m + M] has length L.
  std::vector<cvec> y_hat;
  /// b_mats[m + M] is N_BS x L; empty unless the problem was built with explicit matrices.
  std::vector<cmat> b_mats;

  [[nodiscard]] int slot_count() const { return static_cast<int>(pairings.size()); }
  [[nodiscard]] int subcarrier_count() const { return static_cast<int>(y_hat.size()); }
  [[nodiscard]] bool has_matrices() const { return !b_mats.empty(); }
};

struct CprState {
  double theta = 0.0;
  double g = 0.0;
  Eigen::VectorXd taus;  // one phase per subcarrier, storage order m + M
  double residual = 0.0;
};

/// Reshapes an observation. With `explicit_matrices` the B_m are materialized and every model
/// evaluation goes through them; otherwise B_m^H a_m(theta) uses its closed form.
CprProblem build_cpr_problem(const TrackingObservation& obs, bool explicit_matrices = false);

/// B_m^H a_m(theta) for storage index i = m + M.
cvec model_vector(const CprProblem& prob, int i, double theta);
/// d/dtheta of model_vector.
cvec model_vector_derivative(const CprProblem& prob, int i, double theta);

double objective(const CprProblem& prob, double theta, double g, const Eigen::VectorXd& taus);
double objective(const CprProblem& prob, const CprState& state);

/// Least-squares amplitude of the modulus model: sum_m <|y_m|, |v_m|> / sum_m ||v_m||^2.
/// Throws DegenerateError when every model vector vanishes.
double update_gain(const CprProblem& prob, const CprState& state);

struct PhaseUpdate {
  Eigen::VectorXd taus;
  /// Subcarriers whose inner product vanished; their phase is set to 0.
  int degenerate = 0;
};

/// tau_m = arg(v_m^H y_m), the exact minimizer over each phase at fixed theta and g.
PhaseUpdate update_phases(const CprProblem& prob, const CprState& state);

/// d eps / d theta = 2 Re sum_m (y_m - c_m v_m)^H (-c_m v_m'), with c_m = g e^{j tau_m}.
double objective_gradient(const CprProblem& prob, const CprState& state);
/// The same derivative formed as z + conj(z); the imaginary part is zero by construction.
std::complex<double> objective_gradient_complex(const CprProblem& prob, const CprState& state);

struct RefineOptions {
  int max_iter = 50;
  /// Stop once (delta g)^2 + (delta theta)^2 falls below tol.
  double tol = 1e-10;
  /// Initial gradient step; each line search starts from min(step, 4 * last accepted step).
  double step = 1e-2;
  /// Abort after this many consecutive iterations with growing residual.
  int divergence_window = 5;
  bool record_trace = false;
};

struct TraceEntry {
  int iteration = 0;
  double theta = 0.0;
  double g = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct RefineResult {
  CprState state;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  int degenerate_phases = 0;
  std::string diagnostic;
  std::vector<TraceEntry> trace;
};

/// Gain update, phase update and one gradient step on theta per iteration, starting at
/// theta_init with g = 0. On divergence the lowest-residual state seen is returned.
RefineResult refine(const CprProblem& prob, double theta_init, const RefineOptions& opts = {});

/// Writes "iteration,theta,g,residual,step" rows.
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace ttdtrack
