#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "flexsat/formula/cnf.hpp"
#include "flexsat/solver/control.hpp"
#include "flexsat/solver/import_ring.hpp"
#include "flexsat/solver/portfolio.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::solver {

/// Conflict-driven clause learning solver: two watched literals, first-UIP
/// learning with recursive minimization, EVSIDS, phase saving, Luby or
/// geometric restarts and LBD-based learned clause reduction.
///
/// The engine is resumable: run() works until a verdict or until the given
/// limits are reached and can be called again to continue. Shared clauses
/// are pulled from the import ring whenever the search is at decision
/// level 0.
class CdclEngine {
 public:
  CdclEngine(const Cnf& cnf, const CdclParams& params, std::uint64_t seed);

  void set_import_ring(ImportRing* ring) { ring_ = ring; }
  void set_export_sink(ExportSink* sink) { sink_ = sink; }

  Verdict run(const StepLimits& limits);
  Verdict verdict() const { return status_; }

  /// Valid once run() returned Sat.
  Assignment model() const;
  const SolverStats& stats() const { return stats_; }

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoRef = 0xffffffffu;

  struct Watcher {
    CRef cref;
    std::uint32_t blocker;
  };

  // literal code: 2 * var + negated, var zero-based
  static std::uint32_t code_of(Lit l) { return 2u * static_cast<std::uint32_t>(var_of(l) - 1) + (l < 0 ? 1u : 0u); }
  static Lit lit_of(std::uint32_t code) {
    const Lit v = static_cast<Lit>(code >> 1) + 1;
    return (code & 1u) ? -v : v;
  }
  static std::uint32_t var(std::uint32_t code) { return code >> 1; }
  static std::uint32_t neg(std::uint32_t code) { return code ^ 1u; }

  // +1 true, -1 false, 0 unassigned
  int value(std::uint32_t code) const {
    const int v = assigns_[var(code)];
    return (code & 1u) ? -v : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  // clause arena: [size][flags | lbd << 8][activity bits][lits...]
  std::uint32_t csize(CRef c) const { return arena_[c]; }
  std::uint32_t* clits(CRef c) { return &arena_[c + 3]; }
  const std::uint32_t* clits(CRef c) const { return &arena_[c + 3]; }
  bool clearnt(CRef c) const { return arena_[c + 1] & 1u; }
  bool cdeleted(CRef c) const { return arena_[c + 1] & 2u; }
  std::uint32_t clbd(CRef c) const { return arena_[c + 1] >> 8; }
  float cactivity(CRef c) const;
  void set_cactivity(CRef c, float a);

  CRef alloc_clause(const std::vector<std::uint32_t>& lits, bool learnt, std::uint32_t lbd);
  void attach(CRef c);
  bool add_original(std::vector<std::uint32_t> lits);
  void enqueue(std::uint32_t lit, CRef reason);
  CRef propagate();
  void analyze(CRef confl, std::vector<std::uint32_t>& learnt, int& bt_level, std::uint32_t& lbd);
  bool lit_redundant(std::uint32_t p, std::uint32_t abstract_levels);
  std::uint32_t abstract_level(std::uint32_t v) const { return 1u << (static_cast<std::uint32_t>(level_[v]) & 31u); }
  std::uint32_t compute_lbd(const std::vector<std::uint32_t>& lits);
  void backtrack(int level);
  std::uint32_t pick_branch();
  void bump_var(std::uint32_t v);
  void bump_clause(CRef c);
  void reduce_db();
  void collect_garbage();
  bool locked(CRef c) const;
  void import_shared();
  void export_learnt(const std::vector<std::uint32_t>& lits, std::uint32_t lbd);
  std::uint64_t next_restart_interval();

  // decision heap on activity
  void heap_insert(std::uint32_t v);
  std::uint32_t heap_pop();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  bool heap_contains(std::uint32_t v) const { return heap_pos_[v] >= 0; }

  CdclParams params_;
  std::mt19937_64 rng_;
  std::uint32_t num_vars_;
  Verdict status_ = Verdict::Unknown;

  std::vector<std::uint32_t> arena_;
  std::size_t wasted_ = 0;
  std::vector<CRef> originals_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;

  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<std::int8_t> polarity_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<std::uint32_t> heap_;
  std::vector<std::int64_t> heap_pos_;

  std::vector<std::uint8_t> seen_;
  std::vector<std::uint32_t> analyze_stack_;
  std::vector<std::uint32_t> analyze_toclear_;
  std::vector<std::uint64_t> level_stamp_;
  std::uint64_t stamp_ = 0;

  std::uint64_t conflicts_since_restart_ = 0;
  std::uint64_t restart_interval_ = 0;
  std::uint64_t restart_count_ = 0;
  std::uint64_t next_reduce_ = 0;
  std::uint64_t reduce_count_ = 0;

  ImportRing* ring_ = nullptr;
  ExportSink* sink_ = nullptr;
  ImportedClause import_buf_;
  SolverStats stats_;
};

}  // namespace flexsat::solver
