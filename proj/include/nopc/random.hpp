// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_RANDOM_HPP
#define NOPC_RANDOM_HPP

#include <cstdint>

namespace nopc
{

// splitmix64 finalizer of seed + (index + 1) * golden ratio. Independent RNG streams per
// sample index, so results never depend on evaluation order.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
{
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace nopc

#endif  // NOPC_RANDOM_HPP
