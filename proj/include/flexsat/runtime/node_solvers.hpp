#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "flexsat/exchange/clause_filter.hpp"
#include "flexsat/formula/cnf.hpp"
#include "flexsat/solver/backend.hpp"
#include "flexsat/solver/control.hpp"
#include "flexsat/solver/import_ring.hpp"
#include "flexsat/solver/portfolio.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::runtime {

struct SolverSetup {
  int tree_index = 0;
  int threads = 1;
  std::uint64_t nonce = 0;
  std::size_t ring_capacity = 1024;
  int filter_bits_log2 = 24;
  double filter_half_life_s = 0;
  int max_export_length = 30;
  double synthetic_work = 0;  // work units; > 0 selects the synthetic backend
  double synthetic_pace = 0;  // units per wall ms (threaded mode)
  bool threaded = false;
};

/// The solvers of one job node. In stepped mode the owner advances them
/// explicitly; in threaded mode each solver runs on its own thread and the
/// owner only polls for a result. Either way, the owning PE context is the
/// only one touching filters and the producer side of the import rings.
class NodeSolvers {
 public:
  NodeSolvers(std::shared_ptr<const Cnf> cnf, const SolverSetup& setup);
  ~NodeSolvers();
  NodeSolvers(const NodeSolvers&) = delete;
  NodeSolvers& operator=(const NodeSolvers&) = delete;

  std::size_t size() const { return slots_.size(); }

  void suspend();
  void resume();
  void terminate();
  bool suspended() const { return suspended_; }

  /// Stepped mode: gives every running solver `work` propagations. Returns
  /// the first verdict found, if any.
  std::optional<solver::SolveResult> step(std::uint64_t work);
  /// Threaded mode: the first result any thread produced, if any.
  std::optional<solver::SolveResult> poll();

  std::vector<solver::ExportedClause> drain_exports() { return exports_.drain(); }
  exchange::ClauseFilter& filter(std::size_t i) { return slots_[i]->filter; }
  solver::ImportRing& ring(std::size_t i) { return slots_[i]->ring; }
  const solver::SolverConfig& config(std::size_t i) const { return slots_[i]->config; }

  std::uint64_t total_work() const;

 private:
  struct Slot {
    Slot(std::size_t ring_capacity, int bits, double half_life) : ring(ring_capacity), filter(bits, half_life) {}
    solver::SolverConfig config;
    solver::SolverControl control;
    solver::ImportRing ring;
    exchange::ClauseFilter filter;
    std::unique_ptr<solver::ExportQueue::Sink> sink;
    std::unique_ptr<solver::SolverBackend> backend;
    std::thread thread;
    bool done = false;  // stepped mode: no further stepping
  };

  std::shared_ptr<const Cnf> cnf_;
  solver::ExportQueue exports_;
  std::vector<std::unique_ptr<Slot>> slots_;
  bool suspended_ = false;
  bool terminated_ = false;
  bool threaded_ = false;

  std::mutex result_mutex_;
  std::optional<solver::SolveResult> result_;
  std::atomic<bool> has_result_{false};
};

}  // namespace flexsat::runtime
