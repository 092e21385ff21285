// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/validation/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/harness.hpp"
#include "ttdtrack/leakage.hpp"
#include "ttdtrack/pairing.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/random.hpp"
#include "ttdtrack/tracker.hpp"
#include "ttdtrack/validation/oracles.hpp"

namespace ttdtrack::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

CriterionResult finish(CriterionResult r, Clock::time_point start, bool ok) {
  r.seconds = seconds_since(start);
  r.passed = ok && (r.time_limit <= 0.0 || r.seconds < r.time_limit);
  if (ok && !r.passed) r.detail += "; time budget exceeded";
  return r;
}

// 1. Dirichlet product against the brute-force inner product.
std::vector<CriterionResult> closed_form_gain(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"1", "closed-form gain vs inner product", false, 0.0, 5.0, {}};
  const SystemConfig cfg = reference_system();
  auto rng = make_rng(opts.seed, {1});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> t_dist(-1.25, 1.25);
  std::uniform_int_distribution<int> m_dist(-cfg.m_half, cfg.m_half);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double psi = unit(rng);
    const double t = t_dist(rng);
    const double theta = unit(rng);
    const double f_m = cfg.frequency(m_dist(rng));
    const double closed = array_gain(f_m, theta, {psi, t}, cfg);
    const double brute = oracle::inner_product_gain(f_m, theta, psi, t, cfg);
    worst = std::max(worst, std::abs(closed - brute));
  }
  r.detail = "max abs error " + num(worst) + " (limit 1e-9) over 1000 tuples";
  return {finish(r, start, worst < 1e-9)};
}

// 2. Brute-force peaks against the subcarrier-angle map.
std::vector<CriterionResult> bijection(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"2", "angle map vs brute-force peaks", false, 0.0, 60.0, {}};
  const SystemConfig cfg = reference_system();
  constexpr double step = 1e-4;
  auto rng = make_rng(opts.seed, {2});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  double worst_theta0 = 0.0;
  double worst_alpha = 0.0;
  int within = 0;
  for (int k = 0; k < 50; ++k) {
    double theta0 = 0.0;
    double alpha = 0.0;
    do {
      theta0 = unit(rng);
      alpha = unit(rng) * backward_bound(theta0, cfg);
    } while (!(alpha > 0.0) || theta0 + alpha > 1.0);
    const PairingConfig pc = make_backward_pairing(theta0, alpha, cfg);
    const PeakMap map = peak_map(pc.precoder(), cfg, step);
    double dev = 0.0;
    for (std::size_t i = 0; i < map.subcarriers.size(); ++i) {
      dev = std::max(dev, std::abs(map.theta[i] - angle_map(map.subcarriers[i], pc.precoder(), cfg)));
    }
    if (dev <= step + 1e-12) ++within;
    if (dev > worst) {
      worst = dev;
      worst_theta0 = theta0;
      worst_alpha = alpha;
    }
  }
  const double theta0 = 0.8;
  const double alpha = 1.1 * forward_bound(theta0, cfg);
  const PairingConfig fw = make_forward_pairing(theta0, alpha, cfg);
  const PeakMap fw_map = peak_map(fw.precoder(), cfg, step);
  double fw_dev = 0.0;
  for (std::size_t i = 0; i < fw_map.subcarriers.size(); ++i) {
    fw_dev = std::max(fw_dev, std::abs(fw_map.theta[i] - angle_map(fw_map.subcarriers[i], fw.precoder(), cfg)));
  }
  const bool backward_ok = worst <= step + 1e-12;
  const bool forward_ok = fw_dev > step;
  r.detail = "backward: " + std::to_string(within) + "/50 within one step, worst deviation " + num(worst) +
             " at theta0=" + num(worst_theta0) + " alpha=" + num(worst_alpha) +
             "; forward 10% over bound: max deviation " + num(fw_dev) + (forward_ok ? " (violation seen)" : "");
  return {finish(r, start, backward_ok && forward_ok)};
}

// 3. Forward bound at the 12.5 GHz setting.
std::vector<CriterionResult> forward_bound_number(const Options&) {
  const auto start = Clock::now();
  CriterionResult r{"3", "forward bound at theta0 = 0.95", false, 0.0, 0.0, {}};
  const SystemConfig cfg = SystemConfig::make(256, 16, 16, 100e9, 12.5e9, 64);
  const double v = forward_bound(0.95, cfg);
  const bool ok = std::abs(v - 0.003125) <= 1e-15 && std::abs(v - 3e-3) < 5e-4;
  r.detail = "forward_bound = " + num(v, 17) + " (expected 0.003125, ~3e-3)";
  return {finish(r, start, ok)};
}

// 4. Radius numbers at the reference system.
std::vector<CriterionResult> theorem1_number(const Options&) {
  const auto start = Clock::now();
  CriterionResult r{"4", "theorem radius 0.1502 and fixed radius 0.0625", false, 0.0, 0.0, {}};
  const SystemConfig cfg = reference_system();
  const double t1 = theorem1_bound(1.0, cfg);
  const double oracle_t1 = oracle::theorem1_from_frequencies(1.0, cfg.f_c, cfg.m_half * cfg.f_d, cfg.p);
  const double fixed = fixed_radius(cfg);
  const bool ok = std::abs(t1 - 0.150157) <= 5e-4 && std::abs(t1 - 0.1502) <= 5e-4 &&
                  std::abs(t1 - oracle_t1) < 1e-15 && fixed == 0.0625;
  r.detail = "theorem1_bound(1) = " + num(t1, 9) + ", oracle " + num(oracle_t1, 9) + ", fixed_radius = " + num(fixed);
  return {finish(r, start, ok)};
}

// 5. Sidelobe geometry of backward pairings.
std::vector<CriterionResult> sidelobe_identities(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"5", "sidelobe weighting identity and unit gain at theta_c", false, 0.0, 0.0, {}};
  const SystemConfig cfg = reference_system();
  auto rng = make_rng(opts.seed, {5});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double f_lo = cfg.lowest_frequency();
  const double f_hi = cfg.highest_frequency();
  double worst_identity = 0.0;
  double worst_gain = 0.0;
  bool sides_ok = true;
  for (int k = 0; k < 100; ++k) {
    const double theta0 = unit(rng);
    const double alpha = 1e-3 + unit(rng) * theorem1_bound(theta0, cfg);
    const PairingConfig pc = make_backward_pairing(theta0, alpha, cfg);
    const SidelobeLocations s = sidelobe_locations(pc, cfg);
    const double weighted = (f_lo * s.theta_side_minus + f_hi * s.theta_side_plus) / (f_lo + f_hi);
    worst_identity = std::max(worst_identity, std::abs(weighted - s.theta_c));
    worst_gain = std::max(worst_gain, std::abs(array_gain(cfg.f_c, s.theta_c, pc.precoder(), cfg) - 1.0));
    sides_ok = sides_ok && (s.theta_side_minus - s.theta_c) * (s.theta_side_plus - s.theta_c) <= 0.0;
  }
  r.detail = "identity error " + num(worst_identity) + ", |gain - 1| " + num(worst_gain) +
             (sides_ok ? ", sidelobes on opposite sides" : ", side check failed");
  return {finish(r, start, worst_identity <= 1e-12 && worst_gain <= 1e-12 && sides_ok)};
}

// 6. Analytic gradient against central differences.
std::vector<CriterionResult> gradient_check(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"6", "objective gradient vs central differences", false, 0.0, 0.0, {}};
  const SystemConfig cfg = reference_system();
  const SubcarrierGrid grid(cfg);
  auto rng = make_rng(opts.seed, {6});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  while (checked < 20) {
    const double theta0 = -0.7 + 1.4 * unit(rng);
    const TrackingPlan plan = plan_tracking(theta0, 0.2, 4, cfg);
    const double theta_r = theta0 - 0.2 + 0.4 * unit(rng);
    PathComponent path;
    path.gain = std::polar(0.5 + unit(rng), 2.0 * std::numbers::pi * unit(rng));
    path.direction = theta_r;
    const auto channel = channel_response(path, grid, cfg);
    const auto obs = run_tracking(plan, channel, 0.5, rng());
    const CprProblem prob = build_cpr_problem(obs);
    CprState state;
    state.theta = theta_r + (unit(rng) - 0.5) * 4e-3;
    state.g = 0.5 + unit(rng);
    state.taus = Eigen::VectorXd::NullaryExpr(cfg.subcarrier_count(), [&] { return 2.0 * std::numbers::pi * unit(rng); });
    const double analytic = objective_gradient(prob, state);
    const double fd = oracle::finite_difference_gradient(prob, state, 1e-6);
    if (std::abs(fd) < 1e-3 * objective(prob, state)) continue;  // too close to a stationary point
    worst = std::max(worst, std::abs(analytic - fd) / std::abs(fd));
    ++checked;
  }
  r.detail = "max relative error " + num(worst) + " (limit 1e-5) over 20 states";
  return {finish(r, start, worst < 1e-5)};
}

// 7. Noiseless recovery on and off the search grid.
std::vector<CriterionResult> noiseless_recovery(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"7", "noiseless on-grid and refined off-grid recovery", false, 0.0, 10.0, {}};
  const SystemConfig cfg = reference_system();
  const SubcarrierGrid grid(cfg);
  auto rng = make_rng(opts.seed, {7});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_on = 0.0;
  double worst_off = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double theta0 = -0.7 + 1.4 * unit(rng);
    const TrackingPlan plan = plan_tracking(theta0, 0.2, 4, cfg);
    const Eigen::MatrixXd angles = search_angles(plan);
    const int l = static_cast<int>(unit(rng) * plan.slot_count()) % plan.slot_count();
    const int i = static_cast<int>(unit(rng) * cfg.subcarrier_count()) % cfg.subcarrier_count();
    const double on_grid = angles(l, i);
    PathComponent path;
    path.gain = std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
    path.direction = on_grid;
    const auto obs_on = run_tracking(plan, channel_response(path, grid, cfg), 0.0, 1);
    worst_on = std::max(worst_on, std::abs(coarse_estimate(obs_on).theta_hat - on_grid));

    // Halfway between two neighbouring search angles of the same slot.
    const int j = std::min(i + 1, cfg.subcarrier_count() - 1) == i ? i - 1 : i + 1;
    path.direction = 0.5 * (angles(l, i) + angles(l, j));
    const auto obs_off = run_tracking(plan, channel_response(path, grid, cfg), 0.0, 1);
    const auto coarse = coarse_estimate(obs_off);
    RefineOptions ro;
    ro.max_iter = 300;
    ro.tol = 1e-24;
    const auto res = refine(build_cpr_problem(obs_off), coarse.theta_hat, ro);
    worst_off = std::max(worst_off, std::abs(res.state.theta - path.direction));
  }
  r.detail = "on-grid max error " + num(worst_on) + " (limit 1e-12), refined off-grid max error " + num(worst_off) +
             " (limit 1e-6)";
  return {finish(r, start, worst_on < 1e-12 && worst_off < 1e-6)};
}

ScenarioConfig monte_carlo_base(const Options& opts) {
  ScenarioConfig scn;
  scn.system = reference_system();
  scn.users = 4;
  scn.trials = opts.mc_trials;
  scn.zeta_max = 0.2;
  scn.slots = {4};
  scn.theta_center = 0.6;
  scn.seed = opts.seed;
  scn.threads = opts.threads;
  return scn;
}

std::string curve(const MetricsReport& rep) {
  std::string s;
  for (const auto& p : rep.points) {
    if (!s.empty()) s += ' ';
    s += num(p.point.snr_db, 4) + ":" + num(p.nmse.db, 4);
  }
  return s;
}

bool monotone(const MetricsReport& rep, double slack) {
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    if (rep.points[i].nmse.db > rep.points[i - 1].nmse.db + slack) return false;
  }
  return true;
}

// 8. Monte Carlo trends.
std::vector<CriterionResult> nmse_trends(const Options& opts) {
  std::vector<CriterionResult> out;
  const std::vector<double> snrs{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};

  auto start = Clock::now();
  ScenarioConfig comp = monte_carlo_base(opts);
  comp.snr_db = snrs;
  comp.compensation = true;
  ScenarioConfig plain = comp;
  plain.compensation = false;
  const MetricsReport rep_comp = sweep(comp);
  const MetricsReport rep_plain = sweep(plain);
  CriterionResult a{"8a", "NMSE decreases with SNR", false, 0.0, 0.0, {}};
  a.detail = "compensated [" + curve(rep_comp) + "] uncompensated [" + curve(rep_plain) + "] dB, slack 0.3 dB";
  const double shared = seconds_since(start);
  a = finish(a, start, monotone(rep_comp, 0.3) && monotone(rep_plain, 0.3));

  start = Clock::now();
  ScenarioConfig noiseless = plain;
  noiseless.snr_db = {std::numeric_limits<double>::infinity()};
  const MetricsReport floor_rep = sweep(noiseless);
  const double floor_db = floor_rep.points.front().nmse.db;
  const double plain20 = rep_plain.points.back().nmse.db;
  const double comp20 = rep_comp.points.back().nmse.db;
  const bool plateau = plain20 - floor_db <= 3.0;
  const bool keeps_falling = comp20 <= plain20 - 5.0;
  CriterionResult b{"8b", "leakage floor without compensation, further fall with it", false, 0.0, 0.0, {}};
  b.detail = "uncompensated 20 dB " + num(plain20, 5) + " dB vs noiseless floor " + num(floor_db, 5) +
             " dB (plateau needs gap <= 3 dB: " + (plateau ? "yes" : "no") + "); compensated 20 dB " + num(comp20, 5) +
             " dB (needs <= " + num(plain20 - 5.0, 5) + ": " + (keeps_falling ? "yes" : "no") + ")";
  b = finish(b, start, plateau && keeps_falling);
  b.seconds += shared;

  start = Clock::now();
  CriterionResult c{"8c", "forward-backward beats forward-only at L = 2, 3", false, 0.0, 0.0, {}};
  bool ordered = true;
  for (int slots : {2, 3}) {
    ScenarioConfig fb = monte_carlo_base(opts);
    fb.slots = {slots};
    fb.snr_db = {10.0};
    fb.compensation = false;
    ScenarioConfig fo = fb;
    fo.scheme = Scheme::forward_only;
    const double nfb = sweep(fb).points.front().nmse.db;
    const double nfo = sweep(fo).points.front().nmse.db;
    ordered = ordered && nfb < nfo;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += "L=" + std::to_string(slots) + ": forward-backward " + num(nfb, 5) + " dB, forward-only " +
                num(nfo, 5) + " dB";
  }
  c = finish(c, start, ordered);

  a.time_limit = 600.0;
  const double total = a.seconds + (b.seconds - shared) + c.seconds;
  if (total >= 600.0) {
    a.passed = false;
    a.detail += "; total runtime " + num(total) + " s exceeds 600 s";
  }
  out.push_back(a);
  out.push_back(b);
  out.push_back(c);
  return out;
}

// 9. Mirror symmetry of the direction sweep.
std::vector<CriterionResult> symmetry(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"9", "direction sweep symmetric about 0", false, 0.0, 0.0, {}};
  ScenarioConfig scn = monte_carlo_base(opts);
  scn.theta_center.reset();
  scn.compensation = false;
  scn.snr_db = {10.0};
  scn.theta = {};
  for (int k = 1; k <= 9; ++k) {
    scn.theta.push_back(-0.1 * k);
    scn.theta.push_back(0.1 * k);
  }
  const MetricsReport rep = sweep(scn);
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i + 1 < rep.points.size(); i += 2) {
    const double neg = rep.points[i].nmse.linear;
    const double pos = rep.points[i + 1].nmse.linear;
    const double rel = std::abs(neg - pos) / (0.5 * (neg + pos));
    worst = std::max(worst, rel);
    ok = ok && rel < 0.15;
    if (!r.detail.empty()) r.detail += ' ';
    r.detail += num(*rep.points[i + 1].point.theta, 2) + ":" + num(rel, 3);
  }
  r.detail = "paired relative gap per |theta| [" + r.detail + "], worst " + num(worst, 4) +
             " (limit 0.15; theta = 0 has no NMSE)";
  return {finish(r, start, ok)};
}

// 10. Bit-identical reruns.
std::vector<CriterionResult> determinism(const Options& opts) {
  const auto start = Clock::now();
  CriterionResult r{"10", "identical reruns with the same seed", false, 0.0, 0.0, {}};
  ScenarioConfig scn = monte_carlo_base(opts);
  scn.trials = 16;
  scn.users = 2;
  scn.snr_db = {0.0, 10.0, 20.0};
  scn.slots = {2, 4};
  scn.theta_center.reset();
  auto render = [](const ScenarioConfig& s) {
    const MetricsReport rep = sweep(s);
    std::ostringstream os;
    write_metrics_csv(os, rep);
    write_metrics_json(os, rep, true);
    return os.str();
  };
  scn.threads = 1;
  const std::string first = render(scn);
  const std::string second = render(scn);
  scn.threads = 3;
  const std::string threaded = render(scn);
  const bool ok = first == second && first == threaded;
  r.detail = std::string("serial rerun ") + (first == second ? "identical" : "differs") + ", 3-thread run " +
             (first == threaded ? "identical" : "differs") + " (" + std::to_string(first.size()) + " bytes)";
  return {finish(r, start, ok)};
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"1", "closed-form gain vs inner product", closed_form_gain},
      {"2", "angle map vs brute-force peaks", bijection},
      {"3", "forward bound at theta0 = 0.95", forward_bound_number},
      {"4", "theorem radius and fixed radius", theorem1_number},
      {"5", "sidelobe identities", sidelobe_identities},
      {"6", "gradient check", gradient_check},
      {"7", "noiseless recovery", noiseless_recovery},
      {"8", "NMSE trends", nmse_trends},
      {"9", "direction sweep symmetry", symmetry},
      {"10", "determinism", determinism},
  };
  return all;
}

std::vector<CriterionResult> run(const Options& opts, const std::vector<std::string>& only) {
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    for (auto& r : c.run(opts)) results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.passed ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.title << " (" << std::fixed << r.seconds << " s";
  if (r.time_limit > 0.0) os << " of " << r.time_limit << " s";
  os << ") | " << r.detail;
  return os.str();
}

}  // namespace ttdtrack::acceptance
