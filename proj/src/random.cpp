// SPDX-License-Identifier: Apache-2.0
#include "ttdtrack/random.hpp"

#include <cmath>
#include <vector>

namespace ttdtrack {

namespace {

std::vector<std::uint32_t> seed_words(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (stream.size() + 1) + 1);
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  // length tag keeps (s, {}) and (s, {0}) apart
  words.push_back(static_cast<std::uint32_t>(stream.size()));
  for (auto key : stream) push(key);
  return words;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  auto words = seed_words(seed, stream);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  auto rng = make_rng(seed, stream);
  return rng();
}

std::complex<double> complex_gaussian(Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = stddev / std::sqrt(2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {scale * re, scale * im};
}

}  // namespace ttdtrack
