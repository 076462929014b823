#pragma once

#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::exchange {

/// Bloom filter over 64-bit clause hashes with four probe positions.
class BloomFilter {
 public:
  explicit BloomFilter(int bits_log2 = 24);

  void insert(std::uint64_t hash);
  bool contains(std::uint64_t hash) const;
  void clear();
  bool allocated() const { return !words_.empty(); }

 private:
  template <typename F>
  void probe(std::uint64_t hash, F&& f) const;

  int bits_log2_;
  std::vector<std::uint64_t> words_;  // allocated on first insert
};

/// Per-solver clause filter. Non-unit clauses go to a two-generation Bloom
/// filter, unit clauses to an exact set. Owned by exactly one context.
class ClauseFilter {
 public:
  explicit ClauseFilter(int bits_log2 = 24, double half_life_s = std::numeric_limits<double>::infinity());

  /// Registers an exported clause. Returns true iff it was not present.
  bool register_export(const Clause& c) { return register_lits(c.lits()); }
  bool register_lits(std::span<const Lit> lits);

  /// Same contract at import: true means the clause should be handed to
  /// the solver, and it is now registered.
  bool check_import(const Clause& c) { return register_lits(c.lits()); }

  bool contains(std::span<const Lit> lits) const;

  /// Forgets roughly half the registered clauses: each unit independently
  /// with probability 1/2, the older Bloom generation as a whole.
  void forget_half(std::uint64_t seed);

  /// Calls forget_half once per elapsed half-life. Time in seconds.
  void maybe_forget(double now_s, std::uint64_t seed);

  std::size_t unit_count() const { return units_.size(); }
  double half_life() const { return half_life_; }

 private:
  BloomFilter current_;
  BloomFilter previous_;
  std::unordered_set<Lit> units_;
  double half_life_;
  double last_forget_s_ = 0;
};

/// Adaptive LBD export limit: starts at the configured value and grows by one
/// whenever a sharing round fills less than 80% of the own buffer.
class LbdGate {
 public:
  LbdGate() = default;
  LbdGate(bool enabled, int initial_limit) : enabled_(enabled), limit_(initial_limit) {}

  bool enabled() const { return enabled_; }
  int limit() const { return limit_; }

  bool admits(std::size_t clause_size, int lbd) const {
    return !enabled_ || clause_size == 1 || lbd <= limit_;
  }

  void update(double fill_ratio) {
    if (enabled_ && fill_ratio < 0.8) ++limit_;
  }

 private:
  bool enabled_ = false;
  int limit_ = 2;
};

}  // namespace flexsat::exchange
