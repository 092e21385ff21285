// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace ttdtrack {

/// Shortest decimal form that round-trips to the same double; "nan"/"inf"/"-inf" otherwise.
std::string fmt_real(double value);

}  // namespace ttdtrack
