// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "ttdtrack/physmodel.hpp"

namespace ttdtrack {

/// How subcarriers are mapped onto the searched interval [theta0 - alpha, theta0 + alpha].
///
/// forward:  f_{-M} -> theta0 - alpha, f_M -> theta0 + alpha (angle increases with m)
/// backward: f_{-M} -> theta0 + alpha, f_M -> theta0 - alpha (angle decreases with m)
/// aligned:  psi = t = theta0, every subcarrier points at theta0 (beam sweeping baseline)
enum class PairingMode { forward, backward, aligned };

std::string_view to_string(PairingMode mode);

struct PairingConfig {
  PairingMode mode = PairingMode::backward;
  double theta0 = 0.0;
  double alpha = 0.0;
  double psi = 0.0;
  double t_aux = 0.0;
  /// Set when alpha exceeds the radius bound of the chosen mode; tracking may fail.
  bool exceeds_bound = false;

  [[nodiscard]] PrecoderConfig precoder() const { return {psi, t_aux}; }
};

}  // namespace ttdtrack
