#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::solver {

struct ImportedClause {
  std::vector<Lit> lits;
  int lbd = 0;
};

/// Lock-free single-producer/single-consumer ring of clauses. Each record
/// occupies 2 + size integers (lbd, size, literals). A push that does not fit
/// is dropped; neither side ever blocks.
class ImportRing {
 public:
  static constexpr std::size_t kSizeFactor = 4;

  explicit ImportRing(std::size_t capacity_ints);

  /// Ring for a job whose sharing rounds carry at most `max_round_literals`.
  static std::size_t capacity_for(std::size_t max_round_literals) {
    return kSizeFactor * max_round_literals + 2;
  }

  std::size_t capacity() const { return buf_.size(); }

  // producer side
  bool push(std::span<const Lit> lits, int lbd = 0);

  // consumer side
  std::optional<ImportedClause> pop();
  bool pop_into(ImportedClause& out);

  std::uint64_t dropped() const { return dropped_.load(std::memory_order_relaxed); }

 private:
  std::vector<std::int32_t> buf_;
  alignas(64) std::atomic<std::uint64_t> head_{0};  // consumer position
  alignas(64) std::atomic<std::uint64_t> tail_{0};  // producer position
  std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace flexsat::solver
