#pragma once

#include <cstdint>
#include <span>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::exchange {

// splitmix64 finalizer
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-independent clause hash: wrapping sum of mixed literals, salted
/// with the clause length.
inline std::uint64_t commutative_hash(std::span<const Lit> lits) {
  std::uint64_t sum = 0;
  for (Lit l : lits) sum += mix64(static_cast<std::uint64_t>(static_cast<std::int64_t>(l)));
  return sum ^ mix64(0xc1a05e5ULL + lits.size());
}

inline std::uint64_t commutative_hash(const Clause& c) { return commutative_hash(c.lits()); }

}  // namespace flexsat::exchange
