// SPDX-License-Identifier: Apache-2.0
// ttdtrack command line: beam patterns, radius bounds, codebooks, single-scenario tracking,
// Monte Carlo sweeps and the acceptance suite.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/codebook.hpp"
#include "ttdtrack/format.hpp"
#include "ttdtrack/harness.hpp"
#include "ttdtrack/leakage.hpp"
#include "ttdtrack/pairing.hpp"
#include "ttdtrack/tracker.hpp"
#include "ttdtrack/validation/acceptance.hpp"

namespace {

using namespace ttdtrack;

// Config file plus one flag per scenario key. Flags are applied after the file.
struct ScenarioArgs {
  std::string config;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app, const std::vector<std::string>& skip = {}) {
    app->add_option("-c,--config", config, "Scenario file (flat YAML mapping)")->check(CLI::ExistingFile);
    for (const auto& key : scenario_keys()) {
      if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      std::string names = "--" + dashed;
      if (dashed != key) names += ",--" + key;
      options[key] = app->add_option(names, flags[key], "Override scenario key '" + key + "'");
    }
  }

  [[nodiscard]] ScenarioConfig resolve() const {
    ScenarioConfig scn = config.empty() ? ScenarioConfig{} : load_scenario(config);
    for (const auto& key : scenario_keys()) {
      auto it = options.find(key);
      if (it != options.end() && it->second->count() > 0) apply_override(scn, key, flags.at(key));
    }
    scn.validate();
    return scn;
  }
};

// Writes to a file when a path is given, to stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

PairingConfig pairing_from_mode(const std::string& mode, double theta0, double alpha, const SystemConfig& cfg) {
  if (mode == "auto") return make_pairing(theta0, alpha, cfg);
  if (mode == "forward") return make_forward_pairing(theta0, alpha, cfg);
  if (mode == "backward") return make_backward_pairing(theta0, alpha, cfg);
  if (mode == "aligned") return make_aligned_pairing(theta0, alpha, cfg);
  throw std::invalid_argument("unknown pairing mode '" + mode + "'");
}

void write_gain_csv(std::ostream& out, const MetricsReport& report) {
  const auto& scn = report.scenario;
  out << "scheme,compensation,codebook,slots,snr_db,theta,records,mean_gain,mean_gain_db,normalized_gain\n";
  for (const auto& p : report.points) {
    const double db = p.mean_gain > 0.0 ? 10.0 * std::log10(p.mean_gain) : -std::numeric_limits<double>::infinity();
    out << to_string(scn.scheme) << ',' << (scn.compensation ? 1 : 0) << ',' << (scn.codebook ? 1 : 0) << ','
        << p.point.slots << ',' << fmt_real(p.point.snr_db) << ','
        << (p.point.theta ? fmt_real(*p.point.theta) : std::string("random")) << ',' << p.records << ','
        << fmt_real(p.mean_gain) << ',' << fmt_real(db) << ',' << fmt_real(p.mean_gain / scn.system.n_bs) << '\n';
  }
}

struct SweepArgs {
  ScenarioArgs scenario;
  std::string seed;
  std::string output;
  std::string json;
  bool full = false;

  void attach(CLI::App* app) {
    scenario.attach(app, {"seed"});
    app->add_option("--seed", seed, "Base seed for every random stream")->required();
    app->add_option("-o,--output", output, "CSV destination (default stdout)");
    app->add_option("--json", json, "JSON report destination");
    app->add_flag("--full", full, "Include per-trial records in the JSON report");
  }

  [[nodiscard]] ScenarioConfig resolve() const {
    ScenarioConfig scn = scenario.resolve();
    apply_override(scn, "seed", seed);
    return scn;
  }
};

void emit_report(const SweepArgs& args, const MetricsReport& report, bool gain_table) {
  Sink csv(args.output);
  if (gain_table) {
    write_gain_csv(csv.stream(), report);
  } else {
    write_metrics_csv(csv.stream(), report);
  }
  if (!args.json.empty() || args.full) {
    // --full without --json sends the report to stderr so the CSV stream stays clean.
    if (args.json.empty()) {
      write_metrics_json(std::cerr, report, args.full);
    } else {
      Sink js(args.json);
      write_metrics_json(js.stream(), report, args.full);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband TTD beam tracking simulator"};
  app.require_subcommand(1);

  // beam-pattern
  auto* bp = app.add_subcommand("beam-pattern", "Array gain over theta for one precoder, or its per-subcarrier peaks");
  ScenarioArgs bp_scn;
  bp_scn.attach(bp);
  std::optional<double> bp_psi;
  std::optional<double> bp_t;
  double bp_theta0 = 0.6;
  double bp_alpha = 0.05;
  std::string bp_mode = "auto";
  double bp_step = 1e-3;
  int bp_stride = 8;
  bool bp_peaks = false;
  std::string bp_out;
  bp->add_option("--psi", bp_psi, "Phase-shifter slope (with --t overrides the pairing)");
  bp->add_option("--t", bp_t, "Time-delay slope");
  bp->add_option("--theta0", bp_theta0, "Pairing center direction");
  bp->add_option("--alpha", bp_alpha, "Pairing radius");
  bp->add_option("--mode", bp_mode, "auto, forward, backward or aligned")
      ->check(CLI::IsMember({"auto", "forward", "backward", "aligned"}));
  bp->add_option("--theta-step", bp_step, "Theta sampling step")->check(CLI::PositiveNumber);
  bp->add_option("--stride", bp_stride, "Subcarrier stride of the gain surface")->check(CLI::PositiveNumber);
  bp->add_flag("--peaks", bp_peaks, "Write the brute-force peak of every subcarrier instead of the surface");
  bp->add_option("-o,--output", bp_out, "CSV destination (default stdout)");

  // bounds
  auto* bd = app.add_subcommand("bounds", "Searching-radius bounds over a grid of center directions");
  ScenarioArgs bd_scn;
  bd_scn.attach(bd);
  double bd_lo = -1.0;
  double bd_hi = 1.0;
  double bd_step = 0.05;
  std::string bd_out;
  bd->add_option("--theta0-min", bd_lo, "First center direction");
  bd->add_option("--theta0-max", bd_hi, "Last center direction");
  bd->add_option("--theta0-step", bd_step, "Grid step")->check(CLI::PositiveNumber);
  bd->add_option("-o,--output", bd_out, "CSV destination (default stdout)");

  // codebook
  auto* cb = app.add_subcommand("codebook", "Dump the quantized psi and t grids");
  ScenarioArgs cb_scn;
  cb_scn.attach(cb);
  std::string cb_out;
  cb->add_option("-o,--output", cb_out, "CSV destination (default stdout)");

  // track
  auto* tr = app.add_subcommand("track", "Track one user once and report every stage");
  ScenarioArgs tr_scn;
  tr_scn.attach(tr);
  double tr_theta_r = 0.62;
  std::optional<double> tr_theta0;
  std::string tr_heatmap;
  std::string tr_trace;
  std::string tr_out;
  tr->add_option("--true-theta", tr_theta_r, "Direction of the path");
  tr->add_option("--theta0", tr_theta0, "Center of the search (default: theta_center, else the true direction)");
  tr->add_option("--heatmap", tr_heatmap, "Write |Y| per slot and subcarrier to this CSV");
  tr->add_option("--trace", tr_trace, "Write the refinement trace to this CSV");
  tr->add_option("-o,--output", tr_out, "Summary CSV destination (default stdout)");

  // sweeps
  auto* sn = app.add_subcommand("sweep-nmse", "Monte Carlo NMSE over the slots x snr_db x theta axes");
  SweepArgs sn_args;
  sn_args.attach(sn);
  auto* sg = app.add_subcommand("sweep-gain", "Monte Carlo beamforming gain over the same axes");
  SweepArgs sg_args;
  sg_args.attach(sg);

  // validate
  auto* va = app.add_subcommand("validate", "Run the acceptance suite");
  acceptance::Options va_opts;
  std::vector<std::string> va_only;
  va->add_option("--only", va_only, "Criterion ids to run (default: all)");
  va->add_option("--seed", va_opts.seed, "Base seed");
  va->add_option("--trials", va_opts.mc_trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
  va->add_option("--threads", va_opts.threads, "Worker threads, 0 for hardware concurrency");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bp) {
      const ScenarioConfig scn = bp_scn.resolve();
      const SystemConfig& cfg = scn.system;
      PrecoderConfig pc;
      if (bp_psi || bp_t) {
        if (!(bp_psi && bp_t)) throw std::invalid_argument("--psi and --t must be given together");
        pc = {*bp_psi, *bp_t};
      } else {
        pc = pairing_from_mode(bp_mode, bp_theta0, bp_alpha, cfg).precoder();
      }
      Sink out(bp_out);
      if (bp_peaks) {
        write_peak_map_csv(out.stream(), peak_map(pc, cfg, bp_step), pc, cfg);
      } else {
        write_gain_surface_csv(out.stream(), pc, cfg, bp_step, bp_stride);
      }
    } else if (*bd) {
      const ScenarioConfig scn = bd_scn.resolve();
      if (!(bd_hi >= bd_lo)) throw std::invalid_argument("--theta0-max must not be below --theta0-min");
      Sink sink(bd_out);
      auto& out = sink.stream();
      out << "theta0,forward,forward_single_slot,backward,fb,theorem1,fixed,quasi_fixed\n";
      const int count = static_cast<int>(std::floor((bd_hi - bd_lo) / bd_step + 1e-9)) + 1;
      for (int i = 0; i < count; ++i) {
        const double theta0 = bd_lo + i * bd_step;
        const RadiusBounds b = radius_bounds(theta0, scn.system);
        out << fmt_real(theta0) << ',' << fmt_real(b.forward) << ',' << fmt_real(b.forward_single_slot) << ','
            << fmt_real(b.backward) << ',' << fmt_real(b.fb) << ',' << fmt_real(b.theorem1) << ','
            << fmt_real(b.fixed) << ',' << fmt_real(b.quasi_fixed) << '\n';
      }
    } else if (*cb) {
      const ScenarioConfig scn = cb_scn.resolve();
      Sink out(cb_out);
      write_codebook_csv(out.stream(), build_codebook(scn.system));
    } else if (*tr) {
      const ScenarioConfig scn = tr_scn.resolve();
      const SystemConfig& cfg = scn.system;
      const double center = tr_theta0 ? *tr_theta0 : scn.theta_center.value_or(tr_theta_r);
      const int slots = scn.slots.front();
      const double snr_db = scn.snr_db.front();
      std::optional<JointCodebook> book;
      if (scn.codebook) book = build_codebook(cfg);
      const JointCodebook* bookp = book ? &*book : nullptr;

      TrackingPlan plan;
      if (scn.scheme == Scheme::exhaustive_sweep) {
        plan = plan_sweep(center, scn.zeta_max, slots, cfg, bookp);
      } else {
        const auto policy =
            scn.scheme == Scheme::forward_only ? PairingPolicy::forward_only : PairingPolicy::forward_backward;
        plan = plan_tracking(center, scn.zeta_max, slots, cfg, bookp, policy);
      }
      for (const auto& s : plan.slots) {
        std::cerr << "slot " << s.index << ": center " << fmt_real(s.theta0) << " radius " << fmt_real(s.alpha)
                  << " mode " << to_string(s.pairing.mode) << " psi " << fmt_real(s.pairing.psi) << " t "
                  << fmt_real(s.pairing.t_aux) << (s.pairing.exceeds_bound ? " (radius exceeds bound)" : "") << '\n';
      }

      PathComponent path;
      path.direction = tr_theta_r;
      path.delay = scn.path_delay;
      const ChannelResponse channel = channel_response(path, SubcarrierGrid(cfg), cfg);
      const double noise_std = std::isinf(snr_db) && snr_db > 0.0
                                   ? 0.0
                                   : std::sqrt(static_cast<double>(cfg.n_bs) / std::pow(10.0, snr_db / 10.0));
      const TrackingObservation obs = run_tracking(plan, channel, noise_std, scn.seed);
      if (!tr_heatmap.empty()) {
        Sink heat(tr_heatmap);
        write_observation_csv(heat.stream(), obs);
      }

      TrackingEstimate est;
      if (scn.scheme == Scheme::exhaustive_sweep) {
        est.l_hat = select_strongest_slot(obs);
        est.theta_hat = estimate_angle(obs, est.l_hat, 0);
      } else {
        est = coarse_estimate(obs);
      }
      RefineResult res;
      if (scn.compensation) {
        RefineOptions opts = scn.refine;
        opts.record_trace = true;
        res = refine(build_cpr_problem(obs), est.theta_hat, opts);
        est.refined = RefinedAngle{res.state.theta, res.state.g, res.state.taus};
        if (!tr_trace.empty()) {
          Sink trace(tr_trace);
          write_trace_csv(trace.stream(), res.trace);
        }
        if (!res.diagnostic.empty()) std::cerr << "refine: " << res.diagnostic << '\n';
      }
      const double theta_hat = est.best_theta();
      Sink sink(tr_out);
      auto& out = sink.stream();
      out << "theta_r,theta0,slots,snr_db,l_hat,m_hat,theta_coarse,theta_refined,g_hat,iterations,converged,"
             "abs_error,gain\n";
      out << fmt_real(tr_theta_r) << ',' << fmt_real(center) << ',' << slots << ',' << fmt_real(snr_db) << ','
          << est.l_hat << ',' << est.m_hat << ',' << fmt_real(est.theta_hat) << ','
          << (est.refined ? fmt_real(est.refined->theta) : std::string("nan")) << ','
          << (est.refined ? fmt_real(est.refined->g) : std::string("nan")) << ',' << res.iterations << ','
          << (res.converged ? 1 : 0) << ',' << fmt_real(std::abs(theta_hat - tr_theta_r)) << ','
          << fmt_real(beamforming_gain(channel, std::clamp(theta_hat, -1.0, 1.0), cfg)) << '\n';
    } else if (*sn) {
      emit_report(sn_args, sweep(sn_args.resolve()), false);
    } else if (*sg) {
      emit_report(sg_args, sweep(sg_args.resolve()), true);
    } else if (*va) {
      int failures = 0;
      for (const auto& r : acceptance::run(va_opts, va_only)) {
        std::cout << acceptance::format_line(r) << std::endl;
        if (!r.passed) ++failures;
      }
      std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
