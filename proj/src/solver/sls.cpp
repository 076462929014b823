#include "flexsat/solver/sls.hpp"

#include <algorithm>
#include <limits>

namespace flexsat::solver {

namespace {

std::size_t slot(Lit l) { return 2 * static_cast<std::size_t>(var_of(l)) + (l < 0 ? 1 : 0); }

}  // namespace

SlsEngine::SlsEngine(const Cnf& cnf, const SlsParams& params, std::uint64_t seed)
    : params_(params), rng_(seed), num_vars_(cnf.num_vars()) {
  fixed_.assign(static_cast<std::size_t>(num_vars_) + 1, -1);
  assign_.assign(static_cast<std::size_t>(num_vars_) + 1, 0);
  occurs_.resize(2 * (static_cast<std::size_t>(num_vars_) + 1));
  preprocess(cnf);
  if (refuted_) return;
  const auto nclauses = static_cast<std::uint32_t>(offsets_.size() - 1);
  for (std::uint32_t c = 0; c < nclauses; ++c)
    for (std::uint32_t i = offsets_[c]; i < offsets_[c + 1]; ++i) occurs_[slot(lits_[i])].push_back(c);
  true_count_.assign(nclauses, 0);
  unsat_pos_.assign(nclauses, -1);
  randomize();
}

void SlsEngine::preprocess(const Cnf& cnf) {
  auto value = [&](Lit l) -> int {
    const auto f = fixed_[static_cast<std::size_t>(var_of(l))];
    if (f < 0) return 0;
    return (f == 1) == (l > 0) ? 1 : -1;
  };
  auto fix = [&](Lit l) { fixed_[static_cast<std::size_t>(var_of(l))] = l > 0 ? 1 : 0; };

  if (params_.preprocess) {
    std::vector<std::uint8_t> pos(static_cast<std::size_t>(num_vars_) + 1), negs(pos.size());
    bool changed = true;
    while (changed && !refuted_) {
      changed = false;
      // unit propagation to fixpoint
      for (const auto& c : cnf.clauses()) {
        Lit open = 0;
        int open_count = 0;
        bool sat = false;
        for (Lit l : c) {
          const int v = value(l);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            open = l;
            ++open_count;
          }
        }
        if (sat) continue;
        if (open_count == 0) {
          refuted_ = true;
          break;
        }
        if (open_count == 1) {
          fix(open);
          changed = true;
        }
      }
      if (changed || refuted_) continue;
      // pure literals among clauses not yet satisfied
      std::fill(pos.begin(), pos.end(), 0);
      std::fill(negs.begin(), negs.end(), 0);
      for (const auto& c : cnf.clauses()) {
        bool sat = false;
        for (Lit l : c) sat = sat || value(l) > 0;
        if (sat) continue;
        for (Lit l : c)
          if (value(l) == 0) (l > 0 ? pos : negs)[static_cast<std::size_t>(var_of(l))] = 1;
      }
      for (int v = 1; v <= num_vars_; ++v) {
        const auto i = static_cast<std::size_t>(v);
        if (fixed_[i] >= 0 || pos[i] == negs[i]) continue;
        fixed_[i] = pos[i] ? 1 : 0;
        changed = true;
      }
    }
  }

  offsets_.assign(1, 0);
  if (refuted_) return;
  for (const auto& c : cnf.clauses()) {
    bool sat = false;
    for (Lit l : c) sat = sat || value(l) > 0;
    if (sat) continue;
    for (Lit l : c)
      if (value(l) == 0) lits_.push_back(l);
    offsets_.push_back(static_cast<std::uint32_t>(lits_.size()));
  }
}

void SlsEngine::mark_unsat(std::uint32_t c) {
  unsat_pos_[c] = static_cast<std::int64_t>(unsat_.size());
  unsat_.push_back(c);
}

void SlsEngine::mark_sat(std::uint32_t c) {
  const auto pos = static_cast<std::size_t>(unsat_pos_[c]);
  const auto last = unsat_.back();
  unsat_[pos] = last;
  unsat_pos_[last] = static_cast<std::int64_t>(pos);
  unsat_.pop_back();
  unsat_pos_[c] = -1;
}

void SlsEngine::randomize() {
  for (int v = 1; v <= num_vars_; ++v) assign_[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(rng_() & 1);
  unsat_.clear();
  const auto nclauses = static_cast<std::uint32_t>(true_count_.size());
  for (std::uint32_t c = 0; c < nclauses; ++c) {
    std::uint32_t count = 0;
    for (std::uint32_t i = offsets_[c]; i < offsets_[c + 1]; ++i) count += lit_true(lits_[i]) ? 1 : 0;
    true_count_[c] = count;
    unsat_pos_[c] = -1;
    if (count == 0) mark_unsat(c);
  }
  flips_since_restart_ = 0;
}

std::uint32_t SlsEngine::break_count(std::uint32_t var) const {
  const Lit true_lit = assign_[var] ? static_cast<Lit>(var) : -static_cast<Lit>(var);
  std::uint32_t breaks = 0;
  for (auto c : occurs_[slot(true_lit)]) breaks += true_count_[c] == 1 ? 1 : 0;
  return breaks;
}

void SlsEngine::flip(std::uint32_t var) {
  const Lit was_true = assign_[var] ? static_cast<Lit>(var) : -static_cast<Lit>(var);
  assign_[var] ^= 1u;
  for (auto c : occurs_[slot(-was_true)])
    if (true_count_[c]++ == 0) mark_sat(c);
  for (auto c : occurs_[slot(was_true)])
    if (--true_count_[c] == 0) mark_unsat(c);
  ++stats_.flips;
  ++stats_.propagations;
  ++flips_since_restart_;
}

Verdict SlsEngine::run(const StepLimits& limits) {
  if (status_ != Verdict::Unknown || refuted_) return status_;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::uint64_t done = 0; done < limits.propagations; ++done) {
    if (unsat_.empty()) {
      status_ = Verdict::Sat;
      return status_;
    }
    if (budget_exhausted()) return Verdict::Unknown;
    if (params_.restart_flips > 0 && flips_since_restart_ >= params_.restart_flips) randomize();

    const auto c = unsat_[rng_() % unsat_.size()];
    const auto begin = offsets_[c], end = offsets_[c + 1];
    std::uint32_t best = 0, best_break = std::numeric_limits<std::uint32_t>::max(), ties = 0;
    for (auto i = begin; i < end; ++i) {
      const auto v = static_cast<std::uint32_t>(var_of(lits_[i]));
      const auto b = break_count(v);
      if (b < best_break) {
        best_break = b;
        best = v;
        ties = 1;
      } else if (b == best_break && rng_() % ++ties == 0) {
        best = v;
      }
    }
    if (best_break > 0 && coin(rng_) < params_.noise)
      best = static_cast<std::uint32_t>(var_of(lits_[begin + rng_() % (end - begin)]));
    flip(best);
  }
  if (unsat_.empty()) status_ = Verdict::Sat;
  return status_;
}

Assignment SlsEngine::model() const {
  Assignment a(num_vars_);
  for (int v = 1; v <= num_vars_; ++v) {
    const auto i = static_cast<std::size_t>(v);
    a.set(v, fixed_[i] >= 0 ? fixed_[i] == 1 : assign_[i] != 0);
  }
  return a;
}

}  // namespace flexsat::solver
