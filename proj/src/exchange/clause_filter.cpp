#include "flexsat/exchange/clause_filter.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "flexsat/exchange/clause_hash.hpp"

namespace flexsat::exchange {

BloomFilter::BloomFilter(int bits_log2) : bits_log2_(bits_log2) {}

template <typename F>
void BloomFilter::probe(std::uint64_t hash, F&& f) const {
  // Four indices from two halves of a remixed hash (double hashing).
  const std::uint64_t h = mix64(hash);
  const std::uint64_t a = h & 0xffffffffULL;
  const std::uint64_t b = (h >> 32) | 1;
  const std::uint64_t mask = (std::uint64_t{1} << bits_log2_) - 1;
  for (std::uint64_t i = 0; i < 4; ++i) f((a + i * b) & mask);
}

void BloomFilter::insert(std::uint64_t hash) {
  if (words_.empty()) words_.assign((std::size_t{1} << bits_log2_) / 64 + 1, 0);
  probe(hash, [&](std::uint64_t bit) { words_[bit >> 6] |= std::uint64_t{1} << (bit & 63); });
}

bool BloomFilter::contains(std::uint64_t hash) const {
  if (words_.empty()) return false;
  bool all = true;
  probe(hash, [&](std::uint64_t bit) { all = all && ((words_[bit >> 6] >> (bit & 63)) & 1); });
  return all;
}

void BloomFilter::clear() {
  words_.clear();
  words_.shrink_to_fit();
}

ClauseFilter::ClauseFilter(int bits_log2, double half_life_s)
    : current_(bits_log2), previous_(bits_log2), half_life_(half_life_s) {}

bool ClauseFilter::contains(std::span<const Lit> lits) const {
  if (lits.size() == 1) return units_.count(lits[0]) > 0;
  const auto h = commutative_hash(lits);
  return current_.contains(h) || previous_.contains(h);
}

bool ClauseFilter::register_lits(std::span<const Lit> lits) {
  if (lits.size() == 1) return units_.insert(lits[0]).second;
  const auto h = commutative_hash(lits);
  if (current_.contains(h) || previous_.contains(h)) return false;
  current_.insert(h);
  return true;
}

void ClauseFilter::forget_half(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto it = units_.begin(); it != units_.end();) {
    if (rng() & 1)
      it = units_.erase(it);
    else
      ++it;
  }
  std::swap(previous_, current_);
  current_.clear();
}

void ClauseFilter::maybe_forget(double now_s, std::uint64_t seed) {
  if (!std::isfinite(half_life_)) return;
  while (now_s - last_forget_s_ >= half_life_) {
    last_forget_s_ += half_life_;
    forget_half(seed ^ mix64(static_cast<std::uint64_t>(last_forget_s_ * 1000.0)));
  }
}

}  // namespace flexsat::exchange
