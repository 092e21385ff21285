// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ttdtrack::acceptance {

struct Options {
  std::uint64_t seed = 20240601;
  /// Monte Carlo trials per point for the statistical criteria (8, 9).
  int mc_trials = 500;
  int threads = 0;
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  /// Zero when the criterion sets no time budget.
  double time_limit = 0.0;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<std::vector<CriterionResult>(const Options&)> run;
};

/// Criteria 1-10 in order; criterion 8 reports its three parts separately.
const std::vector<Criterion>& criteria();

/// Runs the criteria whose id starts with one of `only` (all when empty).
std::vector<CriterionResult> run(const Options& opts, const std::vector<std::string>& only = {});

/// "PASS 1 closed-form gain ... (0.12 s) | detail"
std::string format_line(const CriterionResult& r);

}  // namespace ttdtrack::acceptance
