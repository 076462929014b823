#include "flexsat/solver/cdcl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace flexsat::solver {

namespace {

constexpr std::uint32_t kNoLit = 0xffffffffu;

// Luby sequence value for index x (0-based) with base y.
double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

CdclEngine::CdclEngine(const Cnf& cnf, const CdclParams& params, std::uint64_t seed)
    : params_(params), rng_(seed), num_vars_(static_cast<std::uint32_t>(cnf.num_vars())) {
  const std::size_t n = num_vars_;
  watches_.resize(2 * n);
  assigns_.assign(n, 0);
  level_.assign(n, 0);
  reason_.assign(n, kNoRef);
  polarity_.assign(n, 1);
  activity_.assign(n, 0.0);
  heap_pos_.assign(n, -1);
  seen_.assign(n, 0);
  level_stamp_.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < num_vars_; ++v) {
    switch (params_.phase) {
      case PhasePolicy::False: polarity_[v] = 1; break;
      case PhasePolicy::True: polarity_[v] = 0; break;
      case PhasePolicy::Random: polarity_[v] = static_cast<std::int8_t>(rng_() & 1); break;
    }
    // tiny seeded activity jitter so that equally scored variables are ordered per seed
    activity_[v] = static_cast<double>(rng_() % 1000) * 1e-9;
    heap_insert(v);
  }
  restart_interval_ = next_restart_interval();
  next_reduce_ = static_cast<std::uint64_t>(params_.reduce_first);

  std::vector<std::uint32_t> lits;
  for (const auto& c : cnf.clauses()) {
    lits.clear();
    for (Lit l : c) lits.push_back(code_of(l));
    if (!add_original(lits)) {
      status_ = Verdict::Unsat;
      break;
    }
  }
}

float CdclEngine::cactivity(CRef c) const { return std::bit_cast<float>(arena_[c + 2]); }
void CdclEngine::set_cactivity(CRef c, float a) { arena_[c + 2] = std::bit_cast<std::uint32_t>(a); }

CdclEngine::CRef CdclEngine::alloc_clause(const std::vector<std::uint32_t>& lits, bool learnt, std::uint32_t lbd) {
  const auto c = static_cast<CRef>(arena_.size());
  arena_.push_back(static_cast<std::uint32_t>(lits.size()));
  arena_.push_back((learnt ? 1u : 0u) | (lbd << 8));
  arena_.push_back(std::bit_cast<std::uint32_t>(0.0f));
  arena_.insert(arena_.end(), lits.begin(), lits.end());
  return c;
}

void CdclEngine::attach(CRef c) {
  const auto* lits = clits(c);
  watches_[lits[0]].push_back({c, lits[1]});
  watches_[lits[1]].push_back({c, lits[0]});
}

bool CdclEngine::add_original(std::vector<std::uint32_t> lits) {
  if (lits.size() == 1) {
    const int val = value(lits[0]);
    if (val < 0) return false;
    if (val == 0) enqueue(lits[0], kNoRef);
    return true;
  }
  const CRef c = alloc_clause(lits, false, 0);
  originals_.push_back(c);
  attach(c);
  return true;
}

void CdclEngine::enqueue(std::uint32_t lit, CRef reason) {
  const auto v = var(lit);
  assigns_[v] = (lit & 1u) ? -1 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(lit);
}

CdclEngine::CRef CdclEngine::propagate() {
  CRef conflict = kNoRef;
  while (qhead_ < trail_.size()) {
    const std::uint32_t p = trail_[qhead_++];
    const std::uint32_t false_lit = neg(p);
    ++stats_.propagations;
    auto& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    const std::size_t end = ws.size();
    while (i < end) {
      const Watcher w = ws[i++];
      if (value(w.blocker) == 1) {
        ws[j++] = w;
        continue;
      }
      auto* lits = clits(w.cref);
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      const std::uint32_t first = lits[0];
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = {w.cref, first};
        continue;
      }
      const std::uint32_t size = csize(w.cref);
      bool moved = false;
      for (std::uint32_t k = 2; k < size; ++k) {
        if (value(lits[k]) != -1) {
          lits[1] = lits[k];
          lits[k] = false_lit;
          watches_[lits[1]].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) == -1) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < end) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (conflict != kNoRef) break;
  }
  return conflict;
}

void CdclEngine::analyze(CRef confl, std::vector<std::uint32_t>& learnt, int& bt_level, std::uint32_t& lbd) {
  learnt.clear();
  learnt.push_back(kNoLit);
  int path = 0;
  std::uint32_t p = kNoLit;
  std::size_t index = trail_.size();
  do {
    if (clearnt(confl)) bump_clause(confl);
    const auto* lits = clits(confl);
    const std::uint32_t size = csize(confl);
    for (std::uint32_t j = (p == kNoLit ? 0 : 1); j < size; ++j) {
      const std::uint32_t q = lits[j];
      const std::uint32_t v = var(q);
      if (!seen_[v] && level_[v] > 0) {
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    do {
      --index;
    } while (!seen_[var(trail_[index])]);
    p = trail_[index];
    confl = reason_[var(p)];
    seen_[var(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  analyze_toclear_.assign(learnt.begin(), learnt.end());
  std::uint32_t abstract_levels = 0;
  for (std::size_t i = 1; i < learnt.size(); ++i) abstract_levels |= abstract_level(var(learnt[i]));
  std::size_t j = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const auto v = var(learnt[i]);
    if (reason_[v] == kNoRef || !lit_redundant(learnt[i], abstract_levels)) learnt[j++] = learnt[i];
  }
  learnt.resize(j);
  for (auto l : analyze_toclear_) seen_[var(l)] = 0;

  if (learnt.size() == 1) {
    bt_level = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[var(learnt[i])] > level_[var(learnt[max_i])]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[var(learnt[1])];
  }
  lbd = compute_lbd(learnt);
}

bool CdclEngine::lit_redundant(std::uint32_t p, std::uint32_t abstract_levels) {
  analyze_stack_.clear();
  analyze_stack_.push_back(p);
  const std::size_t top = analyze_toclear_.size();
  while (!analyze_stack_.empty()) {
    const std::uint32_t q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const CRef c = reason_[var(q)];
    const auto* lits = clits(c);
    const std::uint32_t size = csize(c);
    for (std::uint32_t i = 1; i < size; ++i) {
      const std::uint32_t l = lits[i];
      const std::uint32_t v = var(l);
      if (seen_[v] || level_[v] == 0) continue;
      if (reason_[v] != kNoRef && (abstract_level(v) & abstract_levels) != 0) {
        seen_[v] = 1;
        analyze_stack_.push_back(l);
        analyze_toclear_.push_back(l);
      } else {
        for (std::size_t k = top; k < analyze_toclear_.size(); ++k) seen_[var(analyze_toclear_[k])] = 0;
        analyze_toclear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

std::uint32_t CdclEngine::compute_lbd(const std::vector<std::uint32_t>& lits) {
  ++stamp_;
  std::uint32_t count = 0;
  for (auto l : lits) {
    const auto lev = static_cast<std::size_t>(level_[var(l)]);
    if (level_stamp_[lev] != stamp_) {
      level_stamp_[lev] = stamp_;
      ++count;
    }
  }
  return count;
}

void CdclEngine::backtrack(int level) {
  if (decision_level() <= level) return;
  const std::size_t stop = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const auto v = var(trail_[i]);
    assigns_[v] = 0;
    reason_[v] = kNoRef;
    polarity_[v] = static_cast<std::int8_t>(trail_[i] & 1u);
    if (!heap_contains(v)) heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = stop;
}

std::uint32_t CdclEngine::pick_branch() {
  if (params_.random_decision_freq > 0 && !heap_.empty()) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < params_.random_decision_freq) {
      const auto v = heap_[rng_() % heap_.size()];
      if (assigns_[v] == 0) return 2 * v + static_cast<std::uint32_t>(polarity_[v]);
    }
  }
  while (!heap_.empty()) {
    const auto v = heap_pop();
    if (assigns_[v] == 0) return 2 * v + static_cast<std::uint32_t>(polarity_[v]);
  }
  return kNoLit;
}

void CdclEngine::bump_var(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void CdclEngine::bump_clause(CRef c) {
  const float a = cactivity(c) + static_cast<float>(clause_inc_);
  set_cactivity(c, a);
  if (a > 1e20f) {
    for (auto l : learnts_) set_cactivity(l, cactivity(l) * 1e-20f);
    clause_inc_ *= 1e-20;
  }
}

bool CdclEngine::locked(CRef c) const {
  const auto first = clits(c)[0];
  return value(first) == 1 && reason_[var(first)] == c;
}

void CdclEngine::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    if (clbd(a) != clbd(b)) return clbd(a) > clbd(b);
    return cactivity(a) < cactivity(b);
  });
  const std::size_t half = learnts_.size() / 2;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    const CRef c = learnts_[i];
    if (i < half && clbd(c) > 2 && csize(c) > 2 && !locked(c)) {
      arena_[c + 1] |= 2u;
      wasted_ += csize(c) + 3;
    } else {
      learnts_[kept++] = c;
    }
  }
  learnts_.resize(kept);
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return cdeleted(w.cref); }), ws.end());
  if (wasted_ * 2 > arena_.size()) collect_garbage();
}

void CdclEngine::collect_garbage() {
  std::vector<std::uint32_t> fresh;
  fresh.reserve(arena_.size() - wasted_);
  std::unordered_map<CRef, CRef> moved;
  auto relocate = [&](std::vector<CRef>& refs) {
    for (auto& c : refs) {
      const auto nc = static_cast<CRef>(fresh.size());
      fresh.insert(fresh.end(), arena_.begin() + c, arena_.begin() + c + 3 + csize(c));
      moved.emplace(c, nc);
      c = nc;
    }
  };
  relocate(originals_);
  relocate(learnts_);
  for (auto& ws : watches_)
    for (auto& w : ws) w.cref = moved.at(w.cref);
  for (auto l : trail_) {
    auto& r = reason_[var(l)];
    if (r != kNoRef) r = moved.at(r);
  }
  arena_.swap(fresh);
  wasted_ = 0;
}

std::uint64_t CdclEngine::next_restart_interval() {
  const double base = params_.restart_base;
  double interval = 0;
  if (params_.restart == RestartPolicy::Luby)
    interval = base * luby(2.0, restart_count_);
  else
    interval = base * std::pow(params_.restart_factor, static_cast<double>(restart_count_));
  return static_cast<std::uint64_t>(std::min(interval, 1e12));
}

void CdclEngine::export_learnt(const std::vector<std::uint32_t>& lits, std::uint32_t lbd) {
  if (!sink_ || lits.size() > static_cast<std::size_t>(params_.max_export_length)) return;
  std::vector<Lit> out;
  out.reserve(lits.size());
  for (auto l : lits) out.push_back(lit_of(l));
  sink_->export_clause(out, static_cast<int>(lbd));
  ++stats_.exported;
}

void CdclEngine::import_shared() {
  std::vector<std::uint32_t> lits;
  while (ring_->pop_into(import_buf_)) {
    ++stats_.imported;
    lits.clear();
    bool satisfied = false;
    for (Lit l : import_buf_.lits) {
      if (l == 0 || static_cast<std::uint32_t>(var_of(l)) > num_vars_) {
        satisfied = true;  // malformed: ignore the clause
        break;
      }
      const auto code = code_of(l);
      const int val = value(code);
      if (val == 1) {
        satisfied = true;
        break;
      }
      if (val == 0) lits.push_back(code);
    }
    if (satisfied) continue;
    if (lits.empty()) {
      status_ = Verdict::Unsat;
      return;
    }
    if (lits.size() == 1) {
      enqueue(lits[0], kNoRef);
      continue;
    }
    const auto lbd = static_cast<std::uint32_t>(std::clamp<int>(import_buf_.lbd, 1, static_cast<int>(lits.size())));
    const CRef c = alloc_clause(lits, true, lbd);
    learnts_.push_back(c);
    attach(c);
  }
}

Verdict CdclEngine::run(const StepLimits& limits) {
  if (status_ != Verdict::Unknown) return status_;
  const std::uint64_t conflicts_at_start = stats_.conflicts;
  const std::uint64_t props_at_start = stats_.propagations;
  std::vector<std::uint32_t> learnt;
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoRef) {
      ++stats_.conflicts;
      ++conflicts_since_restart_;
      if (decision_level() == 0) {
        status_ = Verdict::Unsat;
        return status_;
      }
      int bt_level = 0;
      std::uint32_t lbd = 0;
      analyze(confl, learnt, bt_level, lbd);
      backtrack(bt_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoRef);
      } else {
        const CRef c = alloc_clause(learnt, true, lbd);
        learnts_.push_back(c);
        attach(c);
        bump_clause(c);
        enqueue(learnt[0], c);
      }
      export_learnt(learnt, lbd);
      var_inc_ /= params_.var_decay;
      clause_inc_ /= 0.999;
      if (stats_.conflicts - conflicts_at_start >= limits.conflicts) return Verdict::Unknown;
      continue;
    }

    if (conflicts_since_restart_ >= restart_interval_) {
      backtrack(0);
      conflicts_since_restart_ = 0;
      ++restart_count_;
      ++stats_.restarts;
      restart_interval_ = next_restart_interval();
    }
    if (decision_level() == 0 && ring_) {
      import_shared();
      if (status_ != Verdict::Unknown) return status_;
      if (qhead_ < trail_.size()) continue;
    }
    if (stats_.conflicts >= next_reduce_) {
      ++reduce_count_;
      next_reduce_ = stats_.conflicts + static_cast<std::uint64_t>(params_.reduce_first) +
                     reduce_count_ * static_cast<std::uint64_t>(params_.reduce_increment);
      reduce_db();
    }
    if (stats_.propagations - props_at_start >= limits.propagations) return Verdict::Unknown;

    const std::uint32_t next = pick_branch();
    if (next == kNoLit) {
      status_ = Verdict::Sat;
      return status_;
    }
    ++stats_.decisions;
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoRef);
  }
}

Assignment CdclEngine::model() const {
  Assignment a(static_cast<int>(num_vars_));
  for (std::uint32_t v = 0; v < num_vars_; ++v) a.set(static_cast<int>(v) + 1, assigns_[v] == 1);
  return a;
}

void CdclEngine::heap_insert(std::uint32_t v) {
  heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

std::uint32_t CdclEngine::heap_pop() {
  const auto top = heap_.front();
  heap_pos_[top] = -1;
  const auto last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

void CdclEngine::heap_up(std::size_t i) {
  const auto v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

void CdclEngine::heap_down(std::size_t i) {
  const auto v = heap_[i];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

}  // namespace flexsat::solver
