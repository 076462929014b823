#include "flexsat/exchange/clause_buffer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "flexsat/exchange/clause_hash.hpp"

namespace flexsat::exchange {

void ExchangeConfig::validate() const {
  if (beta < 1) throw std::invalid_argument("beta must be at least 1");
  if (!(alpha >= 0.5 && alpha <= 1.0)) throw std::invalid_argument("alpha out of [0.5,1]");
  if (!(share_period_s > 0)) throw std::invalid_argument("share period must be positive");
  if (!(half_life_s > 0)) throw std::invalid_argument("filter half-life must be positive");
  if (max_clause_length && *max_clause_length < 1) throw std::invalid_argument("max clause length must be positive");
  if (lbd_gate.enabled && lbd_gate.initial_limit < 1) throw std::invalid_argument("LBD limit must be positive");
  if (filter_bits_log2 < 8 || filter_bits_log2 > 32) throw std::invalid_argument("filter size out of range");
}

namespace {

// Appends clauses of nondecreasing length, maintaining group counts.
class BufferWriter {
 public:
  explicit BufferWriter(std::size_t limit = std::numeric_limits<std::size_t>::max()) : limit_(limit) {}

  std::size_t cost(std::size_t len) const { return len > group_len_ ? (len - group_len_) + len : len; }

  bool try_append(std::span<const Lit> lits) {
    const std::size_t len = lits.size();
    if (out_.data.size() + cost(len) > limit_) return false;
    while (group_len_ < len) {
      count_slot_ = out_.data.size();
      out_.data.push_back(0);
      ++group_len_;
    }
    ++out_.data[count_slot_];
    out_.data.insert(out_.data.end(), lits.begin(), lits.end());
    return true;
  }

  ClauseBuffer take() { return std::move(out_); }

 private:
  ClauseBuffer out_;
  std::size_t limit_;
  std::size_t group_len_ = 0;
  std::size_t count_slot_ = 0;
};

struct SpanHash {
  std::size_t operator()(std::span<const Lit> s) const { return static_cast<std::size_t>(commutative_hash(s)); }
};
struct SpanEq {
  bool operator()(std::span<const Lit> a, std::span<const Lit> b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Sequential reader over one buffer, validating order as it goes.
class Cursor {
 public:
  explicit Cursor(const ClauseBuffer& buf) : d_(buf.data) { advance_group(); }

  bool done() const { return !current_; }
  std::span<const Lit> clause() const { return *current_; }

  void next() {
    const auto prev = *current_;
    pos_ += len_;
    --left_in_group_;
    advance_group();
    if (current_ && clause_less(*current_, prev)) throw BufferFormatError("clauses out of order within buffer");
  }

 private:
  void advance_group() {
    while (left_in_group_ == 0) {
      if (pos_ >= d_.size()) {
        current_.reset();
        return;
      }
      ++len_;
      const std::int32_t count = d_[pos_++];
      if (count < 0) throw BufferFormatError("negative clause count");
      if (static_cast<std::size_t>(count) > (d_.size() - pos_) / len_) throw BufferFormatError("truncated clause group");
      left_in_group_ = static_cast<std::size_t>(count);
    }
    current_ = std::span<const Lit>(d_.data() + pos_, len_);
    if (!is_canonical(*current_)) throw BufferFormatError("non-canonical clause in buffer");
  }

  const std::vector<std::int32_t>& d_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::size_t left_in_group_ = 0;
  std::optional<std::span<const Lit>> current_;
};

}  // namespace

ClauseBuffer serialize(std::vector<Clause> clauses) {
  std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) { return clause_less(a, b); });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  BufferWriter w;
  for (const auto& c : clauses) w.try_append(c.lits());
  return w.take();
}

std::vector<Clause> deserialize(const ClauseBuffer& buf) {
  std::vector<Clause> out;
  for_each_clause(buf, [&](std::span<const Lit> lits) {
    if (!is_canonical(lits)) throw BufferFormatError("non-canonical clause in buffer");
    out.push_back(Clause::from_canonical(std::vector<Lit>(lits.begin(), lits.end())));
  });
  return out;
}

std::size_t serialized_size(std::span<const Clause> sorted_clauses) {
  std::size_t size = 0, group = 0;
  for (const auto& c : sorted_clauses) {
    if (c.size() > group) {
      size += c.size() - group;
      group = c.size();
    }
    size += c.size();
  }
  return size;
}

int buffer_limit(int u, double alpha, int beta) {
  if (u < 1) throw std::invalid_argument("buffer_limit: u must be positive");
  double value = 0;
  const auto uu = static_cast<unsigned>(u);
  if (std::has_single_bit(uu)) {
    // u = 2^k: u * alpha^k = (2 alpha)^k, exact for dyadic alpha
    value = beta;
    for (int k = std::countr_zero(uu); k > 0; --k) value *= 2.0 * alpha;
  } else {
    // u * alpha^log2(u) = u^(1 + log2 alpha); the exponent is exact for alpha in {1/2, 1}
    value = beta * std::pow(static_cast<double>(u), 1.0 + std::log2(alpha));
  }
  return static_cast<int>(std::ceil(value));
}

int buffer_limit(int u, const ExchangeConfig& cfg) { return buffer_limit(u, cfg.alpha, cfg.beta); }

MergeResult merge_limited(std::span<const ClauseBuffer* const> inputs, int u_out, std::size_t limit) {
  std::vector<Cursor> cursors;
  cursors.reserve(inputs.size());
  for (const auto* b : inputs) cursors.emplace_back(*b);

  auto greater = [&](std::size_t a, std::size_t b) {
    const auto ca = cursors[a].clause(), cb = cursors[b].clause();
    if (clause_less(cb, ca)) return true;
    if (clause_less(ca, cb)) return false;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
  for (std::size_t i = 0; i < cursors.size(); ++i)
    if (!cursors[i].done()) heap.push(i);

  MergeResult result;
  result.meta.u = u_out;
  BufferWriter writer(limit);
  std::unordered_set<std::span<const Lit>, SpanHash, SpanEq> seen;
  bool full = false;
  while (!heap.empty()) {
    const std::size_t i = heap.top();
    heap.pop();
    const auto lits = cursors[i].clause();
    if (seen.insert(lits).second) {
      if (!full && !writer.try_append(lits)) full = true;
      if (full) ++result.truncated;
    } else {
      ++result.duplicates;
    }
    cursors[i].next();
    if (!cursors[i].done()) heap.push(i);
  }
  result.buffer = writer.take();
  return result;
}

MergeResult merge(std::span<const MergeInput> children, const ClauseBuffer& own_export, const ExchangeConfig& cfg) {
  std::vector<const ClauseBuffer*> inputs;
  int u = 1;
  for (const auto& c : children) {
    if (c.meta.u < 1) throw BufferFormatError("aggregation count must be positive");
    u += c.meta.u;
    inputs.push_back(&c.buffer);
  }
  inputs.push_back(&own_export);
  return merge_limited(inputs, u, static_cast<std::size_t>(buffer_limit(u, cfg)));
}

}  // namespace flexsat::exchange
