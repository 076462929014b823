#pragma once

#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::solver {

enum class Verdict : std::uint8_t { Unknown, Sat, Unsat };

std::string_view to_string(Verdict v);

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t flips = 0;
  std::uint64_t exported = 0;
  std::uint64_t imported = 0;
};

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Assignment> model;
  SolverStats stats;
};

/// Work limits for one slice of solving. Propagations double as the generic
/// work unit (flips for local search).
struct StepLimits {
  std::uint64_t conflicts = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t propagations = std::numeric_limits<std::uint64_t>::max();
};

/// Receiver of learned clauses. Implementations decide on thread safety.
class ExportSink {
 public:
  virtual ~ExportSink() = default;
  virtual void export_clause(std::span<const Lit> lits, int lbd) = 0;
};

struct ExportedClause {
  int solver = 0;
  std::vector<Lit> lits;
  int lbd = 0;
};

/// Many-producer queue of exported clauses, drained by the owning PE.
class ExportQueue {
 public:
  class Sink final : public ExportSink {
   public:
    Sink(ExportQueue& q, int solver) : queue_(&q), solver_(solver) {}
    void export_clause(std::span<const Lit> lits, int lbd) override;

   private:
    ExportQueue* queue_;
    int solver_;
  };

  Sink sink_for(int solver) { return Sink(*this, solver); }
  void push(int solver, std::span<const Lit> lits, int lbd);
  std::vector<ExportedClause> drain();

 private:
  std::mutex mutex_;
  std::vector<ExportedClause> items_;
};

}  // namespace flexsat::solver
