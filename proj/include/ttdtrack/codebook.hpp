// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ttdtrack/pairing_config.hpp"
#include "ttdtrack/system.hpp"

namespace ttdtrack {

/// Closed interval [lo, hi] sampled uniformly with spacing at most `step`.
struct QuantSegment {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::string label;
};

/// Codeword values of a closed interval: both endpoints plus equal spacing no larger than step.
std::vector<double> uniform_quantization(double lo, double hi, double step);

/// Sorted, deduplicated union of uniform segments.
class QuantGrid {
 public:
  QuantGrid() = default;
  explicit QuantGrid(std::vector<QuantSegment> segments);

  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] const std::vector<QuantSegment>& segments() const { return segments_; }
  /// Segment that contributed values()[i]; shared endpoints belong to the finer segment.
  [[nodiscard]] const std::string& segment_label(std::size_t i) const { return segments_[owner_[i]].label; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] double min() const { return values_.front(); }
  [[nodiscard]] double max() const { return values_.back(); }
  [[nodiscard]] double max_spacing() const;

 private:
  std::vector<QuantSegment> segments_;
  std::vector<double> values_;
  std::vector<std::size_t> owner_;
};

/// Quantized PS slope and TTD slope sets serving both beamforming and tracking.
///
/// psi lives on [-1, 1] with resolution 2/N_BS. t keeps the same resolution on [-1, 1]
/// and extends to +-f_c / (M f_d P) with resolution 2/P, the range the backward pairing
/// needs at the fixed radius 1/P.
struct JointCodebook {
  QuantGrid psi_grid;
  QuantGrid t_grid;
  double t_max = 0.0;
};

JointCodebook build_codebook(const SystemConfig& cfg);

/// Nearest codeword; ties go to the smaller value. Throws std::invalid_argument on an empty grid.
double snap(double value, const QuantGrid& grid);

/// Replaces psi and t by their nearest codewords.
PairingConfig quantized_pairing(const PairingConfig& pairing, const JointCodebook& cb);

/// Writes "index,psi_or_t,value,segment" rows for both grids.
void write_codebook_csv(std::ostream& out, const JointCodebook& cb);

}  // namespace ttdtrack
