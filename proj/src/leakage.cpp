// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "ttdtrack/errors.hpp"
#include "ttdtrack/format.hpp"

namespace ttdtrack {

using std::numbers::pi;

namespace {

struct PowerSum {
  std::complex<double> value;
  std::complex<double> derivative;  // with respect to u
};

// sum_{k<n} exp(-j pi k u) and its derivative in u.
PowerSum power_sum(int n, double u) {
  const std::complex<double> z = std::polar(1.0, -pi * u);
  std::complex<double> w{1.0, 0.0};
  PowerSum s{{0.0, 0.0}, {0.0, 0.0}};
  for (int k = 0; k < n; ++k) {
    s.value += w;
    s.derivative += std::complex<double>(0.0, -pi * k) * w;
    w *= z;
  }
  return s;
}

std::complex<double> power_sum_value(int n, double u) {
  const std::complex<double> z = std::polar(1.0, -pi * u);
  std::complex<double> w{1.0, 0.0};
  std::complex<double> value{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    value += w;
    w *= z;
  }
  return value;
}

void check_index(const CprProblem& prob, int i) {
  if (i < 0 || i >= prob.subcarrier_count()) throw DomainError("subcarrier storage index out of range");
}

double subcarrier_frequency(const CprProblem& prob, int i) { return prob.cfg.frequency(i - prob.cfg.m_half); }

cvec steering_derivative(double f_m, double f_c, double theta, int n) {
  cvec a = steering_vector(f_m, f_c, theta, n);
  for (int k = 0; k < n; ++k) a[k] *= std::complex<double>(0.0, -pi * (f_m / f_c) * k);
  return a;
}

void check_taus(const CprProblem& prob, const Eigen::VectorXd& taus) {
  if (taus.size() != prob.subcarrier_count()) throw DimensionError("phase vector length != subcarrier count");
}

}  // namespace

CprProblem build_cpr_problem(const TrackingObservation& obs, bool explicit_matrices) {
  if (obs.y.rows() != static_cast<Eigen::Index>(obs.pairings.size()) ||
      obs.y.cols() != obs.cfg.subcarrier_count()) {
    throw DimensionError("observation shape does not match its pairings");
  }
  CprProblem prob;
  prob.cfg = obs.cfg;
  prob.pairings = obs.pairings;
  prob.precoder_scale = obs.precoder_scale;
  const int slots = obs.slot_count();
  prob.y_hat.reserve(obs.y.cols());
  for (Eigen::Index i = 0; i < obs.y.cols(); ++i) prob.y_hat.emplace_back(obs.y.col(i).conjugate());
  if (explicit_matrices) {
    prob.b_mats.reserve(obs.y.cols());
    for (Eigen::Index i = 0; i < obs.y.cols(); ++i) {
      const double f_m = subcarrier_frequency(prob, static_cast<int>(i));
      cmat b(obs.cfg.n_bs, slots);
      for (int l = 0; l < slots; ++l) {
        b.col(l) = assemble_precoder(obs.pairings[l].precoder(), f_m, obs.cfg) * obs.precoder_scale;
      }
      prob.b_mats.push_back(std::move(b));
    }
  }
  return prob;
}

cvec model_vector(const CprProblem& prob, int i, double theta) {
  check_index(prob, i);
  const auto& cfg = prob.cfg;
  const double f_m = subcarrier_frequency(prob, i);
  if (prob.has_matrices()) {
    return prob.b_mats[i].adjoint() * steering_vector(f_m, cfg.f_c, theta, cfg.n_bs);
  }
  const double ratio = f_m / cfg.f_c;
  const double baseband_ratio = (f_m - cfg.f_c) / cfg.f_c;
  cvec v(prob.slot_count());
  for (int l = 0; l < prob.slot_count(); ++l) {
    const auto& pc = prob.pairings[l];
    const double x = ratio * theta - pc.psi;
    const auto window = power_sum_value(cfg.p, x);
    const auto beam = power_sum_value(cfg.n_ttd, cfg.p * (x - baseband_ratio * pc.t_aux));
    v[l] = prob.precoder_scale * window * beam;
  }
  return v;
}

cvec model_vector_derivative(const CprProblem& prob, int i, double theta) {
  check_index(prob, i);
  const auto& cfg = prob.cfg;
  const double f_m = subcarrier_frequency(prob, i);
  if (prob.has_matrices()) {
    return prob.b_mats[i].adjoint() * steering_derivative(f_m, cfg.f_c, theta, cfg.n_bs);
  }
  const double ratio = f_m / cfg.f_c;
  const double baseband_ratio = (f_m - cfg.f_c) / cfg.f_c;
  cvec dv(prob.slot_count());
  for (int l = 0; l < prob.slot_count(); ++l) {
    const auto& pc = prob.pairings[l];
    const double x = ratio * theta - pc.psi;
    const auto window = power_sum(cfg.p, x);
    const auto beam = power_sum(cfg.n_ttd, cfg.p * (x - baseband_ratio * pc.t_aux));
    const auto dx = window.derivative * beam.value + window.value * (static_cast<double>(cfg.p) * beam.derivative);
    dv[l] = prob.precoder_scale * ratio * dx;
  }
  return dv;
}

double objective(const CprProblem& prob, double theta, double g, const Eigen::VectorXd& taus) {
  check_taus(prob, taus);
  double total = 0.0;
  for (int i = 0; i < prob.subcarrier_count(); ++i) {
    const std::complex<double> c = std::polar(g, taus[i]);
    total += (prob.y_hat[i] - c * model_vector(prob, i, theta)).squaredNorm();
  }
  return total;
}

double objective(const CprProblem& prob, const CprState& state) {
  return objective(prob, state.theta, state.g, state.taus);
}

double update_gain(const CprProblem& prob, const CprState& state) {
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < prob.subcarrier_count(); ++i) {
    const cvec v = model_vector(prob, i, state.theta);
    num += prob.y_hat[i].cwiseAbs().dot(v.cwiseAbs());
    den += v.squaredNorm();
  }
  if (!(den > 0.0)) throw DegenerateError("every model vector vanishes at this angle");
  return num / den;
}

PhaseUpdate update_phases(const CprProblem& prob, const CprState& state) {
  PhaseUpdate out;
  out.taus.resize(prob.subcarrier_count());
  for (int i = 0; i < prob.subcarrier_count(); ++i) {
    const std::complex<double> inner = model_vector(prob, i, state.theta).dot(prob.y_hat[i]);
    if (std::abs(inner) == 0.0) {
      out.taus[i] = 0.0;
      ++out.degenerate;
    } else {
      out.taus[i] = std::arg(inner);
    }
  }
  return out;
}

std::complex<double> objective_gradient_complex(const CprProblem& prob, const CprState& state) {
  check_taus(prob, state.taus);
  std::complex<double> z{0.0, 0.0};
  for (int i = 0; i < prob.subcarrier_count(); ++i) {
    const std::complex<double> c = std::polar(state.g, state.taus[i]);
    const cvec residual = prob.y_hat[i] - c * model_vector(prob, i, state.theta);
    const cvec d_model = -c * model_vector_derivative(prob, i, state.theta);
    z += residual.dot(d_model);
  }
  return z + std::conj(z);
}

double objective_gradient(const CprProblem& prob, const CprState& state) {
  return objective_gradient_complex(prob, state).real();
}

RefineResult refine(const CprProblem& prob, double theta_init, const RefineOptions& opts) {
  if (opts.max_iter < 1) throw DomainError("max_iter must be positive");
  if (!(opts.step > 0.0)) throw DomainError("step must be positive");
  RefineResult result;
  CprState state;
  state.theta = theta_init;
  state.g = 0.0;
  state.taus = Eigen::VectorXd::Zero(prob.subcarrier_count());
  state.residual = objective(prob, state);

  CprState best = state;
  double last_step = opts.step;
  double previous_residual = state.residual;
  int growth = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const double g_before = state.g;
    const double theta_before = state.theta;

    state.g = update_gain(prob, state);
    const PhaseUpdate phases = update_phases(prob, state);
    state.taus = phases.taus;
    result.degenerate_phases = phases.degenerate;

    const double base = objective(prob, state);
    const double grad = objective_gradient(prob, state);

    // Halve until the residual drops, then keep halving while that still helps.
    double eta = std::min(opts.step, 4.0 * last_step);
    double accepted_eta = 0.0;
    double accepted_residual = base;
    if (grad != 0.0 && std::isfinite(grad)) {
      for (int h = 0; h < 200; ++h) {
        const double trial = objective(prob, state.theta - eta * grad, state.g, state.taus);
        if (trial < accepted_residual) {
          accepted_eta = eta;
          accepted_residual = trial;
        } else if (accepted_eta > 0.0) {
          break;
        }
        eta *= 0.5;
        if (eta * std::abs(grad) < std::numeric_limits<double>::min()) break;
      }
    }
    if (accepted_eta > 0.0) {
      state.theta -= accepted_eta * grad;
      last_step = accepted_eta;
    }
    state.residual = accepted_residual;
    result.iterations = it;

    if (opts.record_trace) result.trace.push_back({it, state.theta, state.g, state.residual, accepted_eta});
    if (state.residual < best.residual || it == 1) best = state;

    growth = state.residual > previous_residual ? growth + 1 : 0;
    previous_residual = state.residual;
    if (growth >= opts.divergence_window) {
      result.diverged = true;
      result.diagnostic = "residual grew for " + std::to_string(growth) + " consecutive iterations";
      result.state = best;
      return result;
    }

    const double dg = state.g - g_before;
    const double dtheta = state.theta - theta_before;
    if (dg * dg + dtheta * dtheta < opts.tol) {
      result.converged = true;
      break;
    }
  }
  result.state = state;
  if (!result.converged) result.diagnostic = "iteration limit reached";
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iteration,theta,g,residual,step\n";
  for (const auto& e : trace) {
    out << e.iteration << ',' << fmt_real(e.theta) << ',' << fmt_real(e.g) << ',' << fmt_real(e.residual) << ','
        << fmt_real(e.step) << '\n';
  }
}

}  // namespace ttdtrack
