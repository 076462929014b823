#pragma once

#include <array>
#include <cstdint>

namespace flexsat::solver {

enum class RestartPolicy : std::uint8_t { Luby, Geometric };
enum class PhasePolicy : std::uint8_t { False, True, Random };

struct CdclParams {
  double var_decay = 0.95;
  RestartPolicy restart = RestartPolicy::Luby;
  int restart_base = 100;
  double restart_factor = 1.5;  // geometric only
  PhasePolicy phase = PhasePolicy::False;
  double random_decision_freq = 0.0;
  int reduce_first = 2000;
  int reduce_increment = 300;
  int max_export_length = 30;
};

struct SlsParams {
  double noise = 0.5;
  bool preprocess = false;
  std::uint64_t max_flips = 0;  // 0: unbounded
  std::uint64_t restart_flips = 100000;
};

enum class SolverKind : std::uint8_t { Cdcl, LocalSearch };

inline constexpr int kPortfolioCycle = 14;
inline constexpr int kCdclPresets = 13;

struct SolverConfig {
  int diversification_index = 0;
  std::uint64_t seed = 0;
  SolverKind kind = SolverKind::Cdcl;
  int preset = 0;
  CdclParams cdcl;
  SlsParams sls;
};

/// The 13 CDCL parameter bundles cycled through by the portfolio.
const std::array<CdclParams, kCdclPresets>& cdcl_presets();

/// Configuration of solver slot `slot` (0 <= slot < threads) on the job node
/// with tree index `tree_index`. The diversification index is
/// tree_index * threads + slot; every 14th index selects local search,
/// alternating the preprocessing flag. `nonce` makes re-created solvers
/// differ in their seed. Throws std::invalid_argument if slot >= threads.
SolverConfig make_portfolio_config(int tree_index, int threads, int slot, std::uint64_t nonce);

/// Thread count for a formula whose serialization has `formula_size`
/// integers: threads if formula_size <= threshold, else
/// max(1, floor(threads * threshold / formula_size)).
int throttled_thread_count(std::uint64_t formula_size, std::uint64_t threshold, int threads);

inline constexpr std::uint64_t kDefaultSizeThreshold = 100'000'000;

}  // namespace flexsat::solver
