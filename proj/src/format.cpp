// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/format.hpp"

#include <charconv>
#include <cmath>

namespace ttdtrack {

std::string fmt_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace ttdtrack
