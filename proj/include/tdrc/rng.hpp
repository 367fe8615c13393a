#pragma once

#include <cstdint>
#include <random>

namespace tdrc {

/// Named random substreams derived from one user seed.
enum class Stream : std::uint64_t { kInit = 1, kFolds = 2, kNegatives = 3, kSynthetic = 4 };

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace tdrc
