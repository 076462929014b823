#include "flexsat/solver/types.hpp"

#include "flexsat/solver/import_ring.hpp"

namespace flexsat::solver {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::Unknown: break;
  }
  return "UNKNOWN";
}

void ExportQueue::Sink::export_clause(std::span<const Lit> lits, int lbd) { queue_->push(solver_, lits, lbd); }

void ExportQueue::push(int solver, std::span<const Lit> lits, int lbd) {
  std::lock_guard lock(mutex_);
  items_.push_back({solver, std::vector<Lit>(lits.begin(), lits.end()), lbd});
}

std::vector<ExportedClause> ExportQueue::drain() {
  std::lock_guard lock(mutex_);
  std::vector<ExportedClause> out;
  out.swap(items_);
  return out;
}

ImportRing::ImportRing(std::size_t capacity_ints) : buf_(capacity_ints < 3 ? 3 : capacity_ints) {}

bool ImportRing::push(std::span<const Lit> lits, int lbd) {
  const std::uint64_t cap = buf_.size();
  const std::uint64_t need = lits.size() + 2;
  const std::uint64_t tail = tail_.load(std::memory_order_relaxed);
  const std::uint64_t head = head_.load(std::memory_order_acquire);
  if (lits.empty() || cap - (tail - head) < need) {
    dropped_.fetch_add(1, std::memory_order_relaxed);
    return false;
  }
  std::uint64_t pos = tail;
  buf_[pos++ % cap] = lbd;
  buf_[pos++ % cap] = static_cast<std::int32_t>(lits.size());
  for (Lit l : lits) buf_[pos++ % cap] = l;
  tail_.store(pos, std::memory_order_release);
  return true;
}

bool ImportRing::pop_into(ImportedClause& out) {
  const std::uint64_t cap = buf_.size();
  std::uint64_t head = head_.load(std::memory_order_relaxed);
  const std::uint64_t tail = tail_.load(std::memory_order_acquire);
  if (head == tail) return false;
  out.lbd = buf_[head++ % cap];
  const auto size = static_cast<std::size_t>(buf_[head++ % cap]);
  out.lits.resize(size);
  for (std::size_t i = 0; i < size; ++i) out.lits[i] = buf_[head++ % cap];
  head_.store(head, std::memory_order_release);
  return true;
}

std::optional<ImportedClause> ImportRing::pop() {
  ImportedClause c;
  if (!pop_into(c)) return std::nullopt;
  return c;
}

}  // namespace flexsat::solver
