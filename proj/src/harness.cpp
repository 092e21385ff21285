// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "ttdtrack/codebook.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/format.hpp"
#include "ttdtrack/tracker.hpp"

namespace ttdtrack {

using std::numbers::pi;

namespace {

// Neumaier compensated sum, so the aggregate does not depend on chunking.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("invalid number for " + key + ": '" + s + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("invalid integer for " + key + ": '" + s + "'");
  }
  return value;
}

int parse_int(const std::string& key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("integer out of range for " + key);
  }
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("invalid seed for " + key + ": '" + s + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, std::string_view text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("invalid boolean for " + key + ": '" + s + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, std::string_view text, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(key, item));
  return out;
}

void refresh_spacing(SystemConfig& cfg) { cfg.f_d = cfg.bandwidth / (2.0 * cfg.m_half); }

double clamp_direction(double theta, double limit) { return std::clamp(theta, -limit, limit); }

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double gain_for_precoder(const ChannelResponse& channel, const PrecoderConfig& pc, const SystemConfig& cfg) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_bs));
  CompensatedSum total;
  for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
    const cvec f = assemble_precoder(pc, cfg.frequency(m), cfg) * scale;
    total.add(std::norm(channel.at(m).dot(f)));
  }
  return total.value() / cfg.subcarrier_count();
}

NmseSummary summarize(const std::vector<double>& estimates, const std::vector<double>& truths) {
  if (estimates.size() != truths.size()) throw std::invalid_argument("estimate and truth counts differ");
  NmseSummary s;
  CompensatedSum total;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == 0.0) {
      ++s.excluded;
      continue;
    }
    const double e = estimates[i] - truths[i];
    total.add(e * e / (truths[i] * truths[i]));
    ++s.used;
  }
  s.linear = s.used > 0 ? total.value() / static_cast<double>(s.used) : std::numeric_limits<double>::quiet_NaN();
  if (s.used == 0) {
    s.db = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.db = s.linear > 0.0 ? std::max(kNmseFloorDb, 10.0 * std::log10(s.linear)) : kNmseFloorDb;
  }
  return s;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::forward_backward:
      return "forward_backward";
    case Scheme::forward_only:
      return "forward_only";
    case Scheme::exhaustive_sweep:
      return "exhaustive_sweep";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  const std::string s = trim(name);
  if (s == "forward_backward") return Scheme::forward_backward;
  if (s == "forward_only") return Scheme::forward_only;
  if (s == "exhaustive_sweep") return Scheme::exhaustive_sweep;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

void ScenarioConfig::validate() const {
  system.validate();
  if (users < 1) throw std::invalid_argument("users must be positive");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (snr_db.empty()) throw std::invalid_argument("snr_db needs at least one value");
  for (double s : snr_db) {
    if (std::isnan(s)) throw std::invalid_argument("snr_db values must not be NaN");
  }
  if (slots.empty()) throw std::invalid_argument("slots needs at least one value");
  for (int l : slots) {
    if (l < 1) throw std::invalid_argument("slots values must be positive");
  }
  for (double t : theta) {
    if (!(std::abs(t) <= 1.0)) throw std::invalid_argument("theta values must lie in [-1, 1]");
  }
  if (!(zeta_max > 0.0 && zeta_max < 1.0)) throw std::invalid_argument("zeta_max must lie in (0, 1)");
  if (!(sigma_p >= 0.0)) throw std::invalid_argument("sigma_p must be non-negative");
  if (theta_center && !(std::abs(*theta_center) <= 1.0)) throw std::invalid_argument("theta_center must lie in [-1, 1]");
  if (!(path_delay >= 0.0)) throw std::invalid_argument("path_delay must be non-negative");
  if (refine.max_iter < 1) throw std::invalid_argument("refine_max_iter must be positive");
  if (!(refine.tol > 0.0)) throw std::invalid_argument("refine_tol must be positive");
  if (!(refine.step > 0.0)) throw std::invalid_argument("refine_step must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys{
      "n_bs",         "n_ttd",      "p",          "f_c",        "bandwidth",       "m_half",
      "users",        "snr_db",     "slots",      "theta",      "trials",          "zeta_max",
      "scheme",       "compensation", "codebook", "seed",       "sigma_p",         "theta_center",
      "path_delay",   "refine_max_iter", "refine_tol", "refine_step", "threads"};
  return keys;
}

void apply_override(ScenarioConfig& scn, const std::string& key, const std::string& value) {
  auto& sys = scn.system;
  if (key == "n_bs") {
    sys.n_bs = parse_int(key, value);
  } else if (key == "n_ttd") {
    sys.n_ttd = parse_int(key, value);
  } else if (key == "p") {
    sys.p = parse_int(key, value);
  } else if (key == "f_c") {
    sys.f_c = parse_double(key, value);
  } else if (key == "bandwidth") {
    sys.bandwidth = parse_double(key, value);
    refresh_spacing(sys);
  } else if (key == "m_half") {
    sys.m_half = parse_int(key, value);
    refresh_spacing(sys);
  } else if (key == "users") {
    scn.users = parse_int(key, value);
  } else if (key == "snr_db") {
    scn.snr_db = parse_list<double>(key, value, parse_double);
  } else if (key == "slots") {
    scn.slots = parse_list<int>(key, value, parse_int);
  } else if (key == "theta") {
    scn.theta = parse_list<double>(key, value, parse_double);
  } else if (key == "trials") {
    scn.trials = parse_int(key, value);
  } else if (key == "zeta_max") {
    scn.zeta_max = parse_double(key, value);
  } else if (key == "scheme") {
    scn.scheme = parse_scheme(value);
  } else if (key == "compensation") {
    scn.compensation = parse_bool(key, value);
  } else if (key == "codebook") {
    scn.codebook = parse_bool(key, value);
  } else if (key == "seed") {
    scn.seed = parse_seed(key, value);
  } else if (key == "sigma_p") {
    scn.sigma_p = parse_double(key, value);
  } else if (key == "theta_center") {
    const std::string v = trim(value);
    if (v.empty() || v == "none" || v == "null" || v == "~") {
      scn.theta_center.reset();
    } else {
      scn.theta_center = parse_double(key, v);
    }
  } else if (key == "path_delay") {
    scn.path_delay = parse_double(key, value);
  } else if (key == "refine_max_iter") {
    scn.refine.max_iter = parse_int(key, value);
  } else if (key == "refine_tol") {
    scn.refine.tol = parse_double(key, value);
  } else if (key == "refine_step") {
    scn.refine.step = parse_double(key, value);
  } else if (key == "threads") {
    scn.threads = parse_int(key, value);
  } else {
    throw std::invalid_argument("unknown scenario key '" + key + "'");
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("malformed scenario file: ") + e.what());
  }
  ScenarioConfig scn;
  if (root.IsNull()) return scn;
  if (!root.IsMap()) throw std::invalid_argument("scenario file must be a key: value mapping");
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    const YAML::Node& node = entry.second;
    std::string value;
    if (node.IsSequence()) {
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i > 0) value += ',';
        value += node[i].as<std::string>();
      }
    } else if (node.IsScalar()) {
      value = node.as<std::string>();
    } else if (node.IsNull()) {
      value = "none";
    } else {
      throw std::invalid_argument("nested values are not supported for key '" + key + "'");
    }
    apply_override(scn, key, value);
  }
  scn.validate();
  return scn;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string dump_scenario(const ScenarioConfig& scn) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "n_bs" << YAML::Value << scn.system.n_bs;
  out << YAML::Key << "n_ttd" << YAML::Value << scn.system.n_ttd;
  out << YAML::Key << "p" << YAML::Value << scn.system.p;
  out << YAML::Key << "f_c" << YAML::Value << fmt_real(scn.system.f_c);
  out << YAML::Key << "bandwidth" << YAML::Value << fmt_real(scn.system.bandwidth);
  out << YAML::Key << "m_half" << YAML::Value << scn.system.m_half;
  out << YAML::Key << "users" << YAML::Value << scn.users;
  out << YAML::Key << "snr_db" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double s : scn.snr_db) out << fmt_real(s);
  out << YAML::EndSeq;
  out << YAML::Key << "slots" << YAML::Value << YAML::Flow << scn.slots;
  out << YAML::Key << "theta" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double t : scn.theta) out << fmt_real(t);
  out << YAML::EndSeq;
  out << YAML::Key << "trials" << YAML::Value << scn.trials;
  out << YAML::Key << "zeta_max" << YAML::Value << fmt_real(scn.zeta_max);
  out << YAML::Key << "scheme" << YAML::Value << std::string(to_string(scn.scheme));
  out << YAML::Key << "compensation" << YAML::Value << scn.compensation;
  out << YAML::Key << "codebook" << YAML::Value << scn.codebook;
  out << YAML::Key << "seed" << YAML::Value << scn.seed;
  out << YAML::Key << "sigma_p" << YAML::Value << fmt_real(scn.sigma_p);
  out << YAML::Key << "theta_center" << YAML::Value;
  if (scn.theta_center) {
    out << fmt_real(*scn.theta_center);
  } else {
    out << YAML::Null;
  }
  out << YAML::Key << "path_delay" << YAML::Value << fmt_real(scn.path_delay);
  out << YAML::Key << "refine_max_iter" << YAML::Value << scn.refine.max_iter;
  out << YAML::Key << "refine_tol" << YAML::Value << fmt_real(scn.refine.tol);
  out << YAML::Key << "refine_step" << YAML::Value << fmt_real(scn.refine.step);
  out << YAML::Key << "threads" << YAML::Value << scn.threads;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

double beamforming_gain(const ChannelResponse& channel, double theta_hat, const SystemConfig& cfg) {
  return gain_for_precoder(channel, PrecoderConfig{theta_hat, theta_hat}, cfg);
}

std::vector<TrialRecord> run_trial(const ScenarioConfig& scn, const SweepPoint& point, int trial_index) {
  const SystemConfig& cfg = scn.system;
  const SubcarrierGrid grid(cfg);
  std::optional<JointCodebook> codebook;
  if (scn.codebook) codebook = build_codebook(cfg);
  const JointCodebook* cb = codebook ? &*codebook : nullptr;

  const double snr_lin = std::pow(10.0, point.snr_db / 10.0);
  const double noise_std = std::isinf(point.snr_db) && point.snr_db > 0.0
                               ? 0.0
                               : std::sqrt(static_cast<double>(cfg.n_bs) / snr_lin);

  std::vector<TrialRecord> records;
  records.reserve(scn.users);
  for (int user = 0; user < scn.users; ++user) {
    auto rng = make_rng(scn.seed, {static_cast<std::uint64_t>(trial_index), static_cast<std::uint64_t>(user)});
    // Fixed draw order keeps every stream aligned across points and schemes.
    const double prev_draw = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const double step = std::uniform_real_distribution<double>(-scn.zeta_max, scn.zeta_max)(rng);
    const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(rng);
    const std::complex<double> spread = complex_gaussian(rng, 1.0);
    const std::uint64_t noise_seed = rng();

    TrialRecord rec;
    rec.trial = trial_index;
    rec.user = user;
    rec.snr_db = point.snr_db;
    rec.slots = point.slots;
    if (point.theta) {
      rec.theta_r = clamp_direction(*point.theta, kDirectionLimit);
      rec.theta_prev = rec.theta_r - step;
    } else {
      rec.theta_prev = scn.theta_center ? *scn.theta_center : prev_draw;
      rec.theta_r = clamp_direction(rec.theta_prev + step, kDirectionLimit);
    }
    const double center = clamp_direction(rec.theta_prev, 1.0 - scn.zeta_max);

    PathComponent path;
    path.gain = std::polar(std::abs(1.0 + scn.sigma_p * spread), phase);
    path.direction = rec.theta_r;
    path.delay = scn.path_delay;
    const ChannelResponse channel = channel_response(path, grid, cfg);

    TrackingPlan plan;
    switch (scn.scheme) {
      case Scheme::forward_backward:
        plan = plan_tracking(center, scn.zeta_max, point.slots, cfg, cb, PairingPolicy::forward_backward);
        break;
      case Scheme::forward_only:
        plan = plan_tracking(center, scn.zeta_max, point.slots, cfg, cb, PairingPolicy::forward_only);
        break;
      case Scheme::exhaustive_sweep:
        plan = plan_sweep(center, scn.zeta_max, point.slots, cfg, cb);
        break;
    }
    const TrackingObservation obs = run_tracking(plan, channel, noise_std, noise_seed);

    if (scn.scheme == Scheme::exhaustive_sweep) {
      rec.l_hat = select_strongest_slot(obs);
      rec.m_hat = 0;
      rec.theta_coarse = estimate_angle(obs, rec.l_hat, 0);
    } else {
      const TrackingEstimate est = coarse_estimate(obs);
      rec.l_hat = est.l_hat;
      rec.m_hat = est.m_hat;
      rec.theta_coarse = est.theta_hat;
    }
    rec.theta_hat = rec.theta_coarse;
    rec.theta_refined = std::numeric_limits<double>::quiet_NaN();

    if (scn.compensation) {
      try {
        const CprProblem prob = build_cpr_problem(obs);
        const RefineResult res = refine(prob, rec.theta_coarse, scn.refine);
        rec.theta_refined = res.state.theta;
        rec.refine_iterations = res.iterations;
        rec.refine_converged = res.converged;
        rec.refine_diverged = res.diverged;
        if (res.diverged) rec.diagnostic = res.diagnostic;
        if (std::isfinite(res.state.theta)) rec.theta_hat = res.state.theta;
      } catch (const DegenerateError& e) {
        rec.diagnostic = e.what();
      }
    }

    const double aim = std::clamp(rec.theta_hat, -1.0, 1.0);
    PrecoderConfig bf{aim, aim};
    if (cb != nullptr) bf = PrecoderConfig{snap(aim, cb->psi_grid), snap(aim, cb->t_grid)};
    rec.gain = gain_for_precoder(channel, bf, cfg);
    records.push_back(std::move(rec));
  }
  return records;
}

NmseSummary nmse_of(const std::vector<double>& estimates, const std::vector<double>& truths) {
  return summarize(estimates, truths);
}

NmseSummary nmse(const std::vector<TrialRecord>& records) {
  std::vector<double> est;
  std::vector<double> truth;
  est.reserve(records.size());
  truth.reserve(records.size());
  for (const auto& r : records) {
    est.push_back(r.theta_hat);
    truth.push_back(r.theta_r);
  }
  return summarize(est, truth);
}

NmseSummary nmse_coarse(const std::vector<TrialRecord>& records) {
  std::vector<double> est;
  std::vector<double> truth;
  est.reserve(records.size());
  truth.reserve(records.size());
  for (const auto& r : records) {
    est.push_back(r.theta_coarse);
    truth.push_back(r.theta_r);
  }
  return summarize(est, truth);
}

std::vector<SweepPoint> sweep_points(const ScenarioConfig& scn) {
  std::vector<SweepPoint> points;
  for (int l : scn.slots) {
    for (double s : scn.snr_db) {
      if (scn.theta.empty()) {
        points.push_back({s, l, std::nullopt});
      } else {
        for (double t : scn.theta) points.push_back({s, l, t});
      }
    }
  }
  return points;
}

MetricsReport sweep(const ScenarioConfig& scn) { return sweep(scn, sweep_points(scn)); }

MetricsReport sweep(const ScenarioConfig& scn, const std::vector<SweepPoint>& points) {
  scn.validate();
  MetricsReport report;
  report.scenario = scn;
  report.points.reserve(points.size());
  report.records.reserve(points.size());
  for (const auto& point : points) {
    std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(scn.trials));
    parallel_for(scn.trials, scn.threads, [&](int trial) { per_trial[trial] = run_trial(scn, point, trial); });

    std::vector<TrialRecord> flat;
    flat.reserve(static_cast<std::size_t>(scn.trials) * scn.users);
    for (auto& chunk : per_trial) {
      for (auto& r : chunk) flat.push_back(std::move(r));
    }
    PointMetrics metrics;
    metrics.point = point;
    metrics.nmse = nmse(flat);
    metrics.nmse_coarse = nmse_coarse(flat);
    metrics.records = flat.size();
    CompensatedSum gain;
    for (const auto& r : flat) {
      gain.add(r.gain);
      if (r.refine_diverged) ++metrics.diverged;
    }
    metrics.mean_gain = flat.empty() ? 0.0 : gain.value() / static_cast<double>(flat.size());
    report.points.push_back(metrics);
    report.records.push_back(std::move(flat));
  }
  return report;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  const auto& scn = report.scenario;
  out << "scheme,compensation,codebook,slots,snr_db,theta,trials,users,records,excluded,nmse,nmse_db,"
         "nmse_coarse,nmse_coarse_db,mean_gain,diverged\n";
  for (const auto& p : report.points) {
    out << to_string(scn.scheme) << ',' << (scn.compensation ? 1 : 0) << ',' << (scn.codebook ? 1 : 0) << ','
        << p.point.slots << ',' << fmt_real(p.point.snr_db) << ','
        << (p.point.theta ? fmt_real(*p.point.theta) : std::string("random")) << ',' << scn.trials << ','
        << scn.users << ',' << p.records << ',' << p.nmse.excluded << ',' << fmt_real(p.nmse.linear) << ','
        << fmt_real(p.nmse.db) << ',' << fmt_real(p.nmse_coarse.linear) << ',' << fmt_real(p.nmse_coarse.db) << ','
        << fmt_real(p.mean_gain) << ',' << p.diverged << '\n';
  }
}

void write_metrics_json(std::ostream& out, const MetricsReport& report, bool with_records) {
  using nlohmann::json;
  auto real = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return fmt_real(v);
  };
  const auto& scn = report.scenario;
  json doc;
  doc["scenario"] = {
      {"n_bs", scn.system.n_bs},
      {"n_ttd", scn.system.n_ttd},
      {"p", scn.system.p},
      {"f_c", scn.system.f_c},
      {"bandwidth", scn.system.bandwidth},
      {"m_half", scn.system.m_half},
      {"users", scn.users},
      {"trials", scn.trials},
      {"zeta_max", scn.zeta_max},
      {"scheme", std::string(to_string(scn.scheme))},
      {"compensation", scn.compensation},
      {"codebook", scn.codebook},
      {"seed", scn.seed},
      {"sigma_p", scn.sigma_p},
      {"theta_center", scn.theta_center ? json(*scn.theta_center) : json(nullptr)},
      {"path_delay", scn.path_delay},
  };
  json points = json::array();
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    json jp = {
        {"slots", p.point.slots},
        {"snr_db", real(p.point.snr_db)},
        {"theta", p.point.theta ? json(*p.point.theta) : json(nullptr)},
        {"records", p.records},
        {"excluded", p.nmse.excluded},
        {"nmse", real(p.nmse.linear)},
        {"nmse_db", real(p.nmse.db)},
        {"nmse_coarse", real(p.nmse_coarse.linear)},
        {"nmse_coarse_db", real(p.nmse_coarse.db)},
        {"mean_gain", real(p.mean_gain)},
        {"diverged", p.diverged},
    };
    if (with_records) {
      json recs = json::array();
      for (const auto& r : report.records[i]) {
        recs.push_back({
            {"trial", r.trial},
            {"user", r.user},
            {"theta_prev", r.theta_prev},
            {"theta_r", r.theta_r},
            {"theta_coarse", r.theta_coarse},
            {"theta_refined", std::isnan(r.theta_refined) ? json(nullptr) : json(r.theta_refined)},
            {"theta_hat", r.theta_hat},
            {"gain", r.gain},
            {"l_hat", r.l_hat},
            {"m_hat", r.m_hat},
            {"refine_iterations", r.refine_iterations},
            {"refine_converged", r.refine_converged},
            {"refine_diverged", r.refine_diverged},
            {"diagnostic", r.diagnostic},
        });
      }
      jp["trial_records"] = std::move(recs);
    }
    points.push_back(std::move(jp));
  }
  doc["points"] = std::move(points);
  out << doc.dump(2) << '\n';
}

}  // namespace ttdtrack
