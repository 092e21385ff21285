// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ttdtrack {

/// Mismatched vector/matrix sizes or configurations built for different systems.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A solver step has no well-defined answer (e.g. an all-zero least-squares denominator).
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ttdtrack
