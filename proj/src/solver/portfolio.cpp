#include "flexsat/solver/portfolio.hpp"

#include <stdexcept>

#include "flexsat/exchange/clause_hash.hpp"

namespace flexsat::solver {

namespace {

CdclParams preset(double decay, RestartPolicy restart, int base, double factor, PhasePolicy phase, double rnd) {
  CdclParams p;
  p.var_decay = decay;
  p.restart = restart;
  p.restart_base = base;
  p.restart_factor = factor;
  p.phase = phase;
  p.random_decision_freq = rnd;
  return p;
}

}  // namespace

const std::array<CdclParams, kCdclPresets>& cdcl_presets() {
  using R = RestartPolicy;
  using P = PhasePolicy;
  static const std::array<CdclParams, kCdclPresets> presets = {
      preset(0.95, R::Luby, 100, 0, P::False, 0.0),
      preset(0.95, R::Geometric, 100, 1.5, P::True, 0.0),
      preset(0.90, R::Luby, 64, 0, P::Random, 0.0),
      preset(0.99, R::Luby, 256, 0, P::False, 0.01),
      preset(0.85, R::Geometric, 50, 1.2, P::False, 0.0),
      preset(0.92, R::Luby, 128, 0, P::True, 0.02),
      preset(0.97, R::Geometric, 200, 1.3, P::Random, 0.0),
      preset(0.95, R::Luby, 32, 0, P::False, 0.05),
      preset(0.88, R::Luby, 512, 0, P::True, 0.0),
      preset(0.99, R::Geometric, 100, 2.0, P::False, 0.01),
      preset(0.93, R::Luby, 100, 0, P::Random, 0.02),
      preset(0.96, R::Geometric, 300, 1.1, P::True, 0.0),
      preset(0.90, R::Luby, 200, 0, P::False, 0.005),
  };
  return presets;
}

SolverConfig make_portfolio_config(int tree_index, int threads, int slot, std::uint64_t nonce) {
  if (threads < 1 || slot < 0 || slot >= threads) throw std::invalid_argument("solver slot out of range");
  if (tree_index < 0) throw std::invalid_argument("negative tree index");
  SolverConfig cfg;
  cfg.diversification_index = tree_index * threads + slot;
  cfg.seed = exchange::mix64(static_cast<std::uint64_t>(cfg.diversification_index) ^ exchange::mix64(nonce));
  const int cycle_pos = cfg.diversification_index % kPortfolioCycle;
  if (cycle_pos < kCdclPresets) {
    cfg.kind = SolverKind::Cdcl;
    cfg.preset = cycle_pos;
    cfg.cdcl = cdcl_presets()[static_cast<std::size_t>(cycle_pos)];
  } else {
    cfg.kind = SolverKind::LocalSearch;
    cfg.preset = cycle_pos;
    cfg.sls.preprocess = (cfg.diversification_index / kPortfolioCycle) % 2 == 0;
  }
  return cfg;
}

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

int throttled_thread_count(std::uint64_t formula_size, std::uint64_t threshold, int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be positive");
  if (formula_size <= threshold) return threads;
  // floor(t * threshold / s) in exact integer arithmetic
  const auto scaled = static_cast<u128>(threads) * threshold / formula_size;
  return scaled < 1 ? 1 : static_cast<int>(scaled);
}

}  // namespace flexsat::solver
