#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cstdint>
#include <random>

namespace shelab {

using Engine = boost::random::mt19937_64;
/// Ziggurat normal sampler; its output sequence is fixed by Boost, unlike
/// std::normal_distribution whose algorithm varies between standard libraries.
using Normal = boost::random::normal_distribution<double>;

/// Engine for replica `stream` under master `seed`.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Engine(seq);
}

/// Fixed per-suite tags; a suite's seed is master ^ tag.
namespace suite_tag {
inline constexpr std::uint64_t kOps = 0x6f70735f73756974ULL;
inline constexpr std::uint64_t kCov = 0x636f765f73756974ULL;
inline constexpr std::uint64_t kDrift = 0x6472696674737569ULL;
inline constexpr std::uint64_t kSpde = 0x7370646573756974ULL;
inline constexpr std::uint64_t kEvolve = 0x65766f6c76657375ULL;
}  // namespace suite_tag

}  // namespace shelab
