// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ttdtrack/errors.hpp"
#include "ttdtrack/format.hpp"

namespace ttdtrack {

namespace {
constexpr double kDuplicateTol = 1e-12;
}

std::vector<double> uniform_quantization(double lo, double hi, double step) {
  if (!(hi > lo) || !(step > 0.0)) throw DomainError("quantization segment needs hi > lo and step > 0");
  const auto intervals = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / step - 1e-9)));
  std::vector<double> values;
  values.reserve(intervals + 1);
  for (long i = 0; i <= intervals; ++i) {
    values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals));
  }
  values.back() = hi;
  return values;
}

QuantGrid::QuantGrid(std::vector<QuantSegment> segments) : segments_(std::move(segments)) {
  struct Entry {
    double value;
    std::size_t segment;
  };
  std::vector<Entry> entries;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    for (double v : uniform_quantization(segments_[s].lo, segments_[s].hi, segments_[s].step)) {
      entries.push_back({v, s});
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  for (const auto& e : entries) {
    if (!values_.empty() && std::abs(e.value - values_.back()) <= kDuplicateTol) {
      if (segments_[e.segment].step < segments_[owner_.back()].step) owner_.back() = e.segment;
      continue;
    }
    values_.push_back(e.value);
    owner_.push_back(e.segment);
  }
}

double QuantGrid::max_spacing() const {
  double gap = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) gap = std::max(gap, values_[i] - values_[i - 1]);
  return gap;
}

JointCodebook build_codebook(const SystemConfig& cfg) {
  cfg.validate();
  const double beam_step = 2.0 / cfg.n_bs;
  const double track_step = 2.0 / cfg.p;
  JointCodebook cb;
  cb.psi_grid = QuantGrid({{-1.0, 1.0, beam_step, "psi"}});
  cb.t_max = cfg.f_c / (cfg.m_half * cfg.f_d * cfg.p);

  std::vector<QuantSegment> t_segments;
  if (cb.t_max > 1.0) t_segments.push_back({-cb.t_max, -1.0, track_step, "outer_negative"});
  t_segments.push_back({-1.0, 1.0, beam_step, "inner"});
  if (cb.t_max > 1.0) t_segments.push_back({1.0, cb.t_max, track_step, "outer_positive"});
  cb.t_grid = QuantGrid(std::move(t_segments));
  return cb;
}

double snap(double value, const QuantGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("snap on an empty grid");
  const auto& v = grid.values();
  auto it = std::lower_bound(v.begin(), v.end(), value);
  if (it == v.begin()) return v.front();
  if (it == v.end()) return v.back();
  const double upper = *it;
  const double lower = *(it - 1);
  return (upper - value) < (value - lower) ? upper : lower;
}

PairingConfig quantized_pairing(const PairingConfig& pairing, const JointCodebook& cb) {
  PairingConfig out = pairing;
  out.psi = snap(pairing.psi, cb.psi_grid);
  out.t_aux = snap(pairing.t_aux, cb.t_grid);
  return out;
}

void write_codebook_csv(std::ostream& out, const JointCodebook& cb) {
  out << "index,psi_or_t,value,segment\n";
  auto dump = [&out](const QuantGrid& grid, const char* name) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << i << ',' << name << ',' << fmt_real(grid.values()[i]) << ',' << grid.segment_label(i) << '\n';
    }
  };
  dump(cb.psi_grid, "psi");
  dump(cb.t_grid, "t");
}

}  // namespace ttdtrack
