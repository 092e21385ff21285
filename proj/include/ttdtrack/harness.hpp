// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttdtrack/leakage.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

enum class Scheme {
  forward_backward,
  forward_only,
  exhaustive_sweep,  // one direction per slot, all subcarriers aligned
};

std::string_view to_string(Scheme scheme);
/// Throws std::invalid_argument on an unknown name.
Scheme parse_scheme(std::string_view name);

/// Monte Carlo scenario. Every scalar field has a matching key in the configuration file.
struct ScenarioConfig {
  SystemConfig system;
  int users = 4;
  std::vector<double> snr_db{10.0};
  std::vector<int> slots{4};
  /// True directions for a direction sweep; empty draws the previous direction at random.
  std::vector<double> theta{};
  int trials = 500;
  double zeta_max = 0.2;
  Scheme scheme = Scheme::forward_backward;
  bool compensation = true;
  bool codebook = false;
  std::uint64_t seed = 0;
  /// Spread of the path amplitude |1 + sigma_p z| with z ~ CN(0, 1).
  double sigma_p = 0.0;
  /// Fixes the previous direction instead of drawing it from U(-1, 1).
  std::optional<double> theta_center{};
  double path_delay = 0.0;
  RefineOptions refine{};
  /// Worker threads for trials; 0 uses the hardware concurrency.
  int threads = 0;

  /// Throws std::invalid_argument naming the first invalid field.
  void validate() const;
};

/// Reads a flat "key: value" YAML document; lists use YAML sequences.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

/// Sets one field from its textual value, e.g. ("snr_db", "-10,0,10") or ("scheme", "forward_only").
/// Throws std::invalid_argument on an unknown key or malformed value.
void apply_override(ScenarioConfig& scn, const std::string& key, const std::string& value);

/// Keys understood by apply_override and the configuration file.
const std::vector<std::string>& scenario_keys();

/// Serializes the scenario back to the configuration file format.
std::string dump_scenario(const ScenarioConfig& scn);

/// Directions stay inside [-kDirectionLimit, kDirectionLimit].
inline constexpr double kDirectionLimit = 0.99;

struct TrialRecord {
  int trial = 0;
  int user = 0;
  double snr_db = 0.0;
  int slots = 0;
  double theta_prev = 0.0;
  double theta_r = 0.0;
  double theta_coarse = 0.0;
  /// NaN when compensation is off.
  double theta_refined = 0.0;
  /// Direction used for the gain metric.
  double theta_hat = 0.0;
  double gain = 0.0;
  int l_hat = 0;
  int m_hat = 0;
  int refine_iterations = 0;
  bool refine_converged = false;
  bool refine_diverged = false;
  std::string diagnostic;
};

/// The axis point a trial is simulated at.
struct SweepPoint {
  double snr_db = 0.0;
  int slots = 1;
  std::optional<double> theta{};
};

/// One trial for every user. The random direction, mobility step, path gain and noise of
/// (seed, trial, user) do not depend on the sweep point or scheme.
std::vector<TrialRecord> run_trial(const ScenarioConfig& scn, const SweepPoint& point, int trial_index);

struct NmseSummary {
  double linear = 0.0;
  double db = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // records with theta_r == 0
};

inline constexpr double kNmseFloorDb = -120.0;

/// Mean of |theta_hat - theta_r|^2 / theta_r^2; dB value floored at kNmseFloorDb.
NmseSummary nmse(const std::vector<TrialRecord>& records);
/// Same metric on theta_coarse.
NmseSummary nmse_coarse(const std::vector<TrialRecord>& records);
NmseSummary nmse_of(const std::vector<double>& estimates, const std::vector<double>& truths);

/// Mean over subcarriers of |h_m^H f_m(theta_hat) / sqrt(N_BS)|^2 with psi = t = theta_hat.
double beamforming_gain(const ChannelResponse& channel, double theta_hat, const SystemConfig& cfg);

struct PointMetrics {
  SweepPoint point;
  NmseSummary nmse;
  NmseSummary nmse_coarse;
  double mean_gain = 0.0;
  std::size_t records = 0;
  std::size_t diverged = 0;
};

struct MetricsReport {
  ScenarioConfig scenario;
  std::vector<PointMetrics> points;
  /// Per point, trials x users records in (trial, user) order.
  std::vector<std::vector<TrialRecord>> records;
};

/// Every combination of slots x snr_db x theta (theta omitted when the list is empty).
std::vector<SweepPoint> sweep_points(const ScenarioConfig& scn);

MetricsReport sweep(const ScenarioConfig& scn);
MetricsReport sweep(const ScenarioConfig& scn, const std::vector<SweepPoint>& points);

/// One row per point.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
/// Scenario, points, and per-trial records when `with_records`.
void write_metrics_json(std::ostream& out, const MetricsReport& report, bool with_records);

}  // namespace ttdtrack
