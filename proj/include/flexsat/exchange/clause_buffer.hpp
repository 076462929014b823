#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::exchange {

class BufferFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat, length-grouped clause serialization. For each clause length
/// l = 1, 2, ... the buffer holds a count n_l followed by n_l * l literals.
/// Groups with no clauses are written as a single 0 only when a longer group
/// follows. Within a group clauses appear in canonical lexicographic order.
struct ClauseBuffer {
  std::vector<std::int32_t> data;

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  friend bool operator==(const ClauseBuffer&, const ClauseBuffer&) = default;
};

/// Number of buffers aggregated so far (u).
struct AggregationMeta {
  int u = 1;
};

struct LbdGateConfig {
  bool enabled = false;
  int initial_limit = 2;
};

struct ExchangeConfig {
  int beta = 1500;                // base buffer size in integers
  double alpha = 7.0 / 8.0;       // discount factor per aggregation level
  double share_period_s = 1.0;
  double half_life_s = std::numeric_limits<double>::infinity();
  std::optional<int> max_clause_length = 30;
  LbdGateConfig lbd_gate;
  int filter_bits_log2 = 24;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Sorts and deduplicates `clauses`, then writes them in buffer format.
ClauseBuffer serialize(std::vector<Clause> clauses);

/// Inverse of serialize. Throws BufferFormatError on truncated groups,
/// negative counts, zero literals or non-canonical clauses.
std::vector<Clause> deserialize(const ClauseBuffer& buf);

/// Visits the clauses of `buf` in order without materializing them. The
/// visitor receives the literal span of each clause.
template <typename Visitor>
void for_each_clause(const ClauseBuffer& buf, Visitor&& visit);

/// b(u) = ceil(u * alpha^log2(u) * beta)
int buffer_limit(int u, const ExchangeConfig& cfg);
int buffer_limit(int u, double alpha, int beta);

struct MergeInput {
  ClauseBuffer buffer;
  AggregationMeta meta;
};

struct MergeResult {
  ClauseBuffer buffer;
  AggregationMeta meta;
  std::size_t duplicates = 0;
  std::size_t truncated = 0;  // distinct clauses discarded by the limit
};

/// Merges child buffers and the local export into one buffer of at most
/// buffer_limit(1 + sum of child u) integers. Output is globally ordered by
/// (length, lexicographic), each clause at most once; whole clauses that do
/// not fit are discarded along with everything after them.
MergeResult merge(std::span<const MergeInput> children, const ClauseBuffer& own_export, const ExchangeConfig& cfg);

/// Same, with an explicit integer limit and u value.
MergeResult merge_limited(std::span<const ClauseBuffer* const> inputs, int u_out, std::size_t limit);

// Serialized size of `clauses` if written in the given order (which must be sorted).
std::size_t serialized_size(std::span<const Clause> sorted_clauses);

// ---------------------------------------------------------------------------

template <typename Visitor>
void for_each_clause(const ClauseBuffer& buf, Visitor&& visit) {
  const auto& d = buf.data;
  std::size_t pos = 0;
  std::size_t len = 0;
  while (pos < d.size()) {
    ++len;
    const std::int32_t count = d[pos++];
    if (count < 0) throw BufferFormatError("negative clause count");
    if (static_cast<std::size_t>(count) > (d.size() - pos) / len) throw BufferFormatError("truncated clause group");
    for (std::int32_t i = 0; i < count; ++i) {
      visit(std::span<const std::int32_t>(d.data() + pos, len));
      pos += len;
    }
  }
}

}  // namespace flexsat::exchange
