// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ttdtrack {

using Rng = std::mt19937_64;

/// Deterministic engine for the substream identified by (seed, stream...).
///
/// Substreams with different keys are statistically independent, so trials,
/// users and timeslots can be simulated in any order or concurrently.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

/// Mixes a seed with substream keys into a new 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = stddev^2.
std::complex<double> complex_gaussian(Rng& rng, double stddev);

}  // namespace ttdtrack
