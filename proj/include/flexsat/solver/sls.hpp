#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "flexsat/formula/cnf.hpp"
#include "flexsat/solver/portfolio.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::solver {

/// WalkSAT (SKC variant) local search. Never reports Unsat. With
/// preprocessing enabled, unit propagation and pure literal elimination run
/// first and the walk only covers the remaining clauses.
class SlsEngine {
 public:
  SlsEngine(const Cnf& cnf, const SlsParams& params, std::uint64_t seed);

  /// Performs at most limits.propagations flips.
  Verdict run(const StepLimits& limits);
  Verdict verdict() const { return status_; }
  bool budget_exhausted() const { return params_.max_flips > 0 && stats_.flips >= params_.max_flips; }
  // No further progress possible: flip budget used up or formula refuted by preprocessing.
  bool stuck() const { return refuted_ || budget_exhausted(); }

  Assignment model() const;
  const SolverStats& stats() const { return stats_; }

 private:
  void preprocess(const Cnf& cnf);
  void randomize();
  void flip(std::uint32_t var);
  std::uint32_t break_count(std::uint32_t var) const;
  bool lit_true(Lit l) const { return (l > 0) == (assign_[static_cast<std::size_t>(var_of(l))] != 0); }
  void mark_unsat(std::uint32_t c);
  void mark_sat(std::uint32_t c);

  SlsParams params_;
  std::mt19937_64 rng_;
  int num_vars_;
  Verdict status_ = Verdict::Unknown;
  bool refuted_ = false;  // preprocessing hit a conflict; the walk cannot succeed

  // variables fixed by preprocessing: -1 free, 0/1 fixed value
  std::vector<std::int8_t> fixed_;

  std::vector<Lit> lits_;               // flattened working clauses
  std::vector<std::uint32_t> offsets_;  // clause c spans [offsets_[c], offsets_[c+1])
  std::vector<std::vector<std::uint32_t>> occurs_;  // literal slot -> clauses
  std::vector<std::uint32_t> true_count_;
  std::vector<std::uint32_t> unsat_;
  std::vector<std::int64_t> unsat_pos_;
  std::vector<std::uint8_t> assign_;  // by variable
  std::uint64_t flips_since_restart_ = 0;
  SolverStats stats_;
};

}  // namespace flexsat::solver
