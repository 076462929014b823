#pragma once

#include <atomic>
#include <cstdint>

namespace flexsat::solver {

enum class SolverState : std::uint8_t { Running, Suspended, Terminated };

/// Preemption cell shared between a PE main context (writer) and one solver
/// context (reader). Legal transitions: Running <-> Suspended and
/// {Running, Suspended} -> Terminated.
class SolverControl {
 public:
  SolverState state() const { return state_.load(std::memory_order_acquire); }

  bool suspend() { return transition(SolverState::Running, SolverState::Suspended); }
  bool resume() { return transition(SolverState::Suspended, SolverState::Running); }

  void terminate() {
    state_.store(SolverState::Terminated, std::memory_order_release);
    state_.notify_all();
  }

  /// Parks the caller while suspended. Returns the state seen on wake-up.
  SolverState wait_while_suspended() const {
    auto s = state();
    while (s == SolverState::Suspended) {
      state_.wait(s, std::memory_order_acquire);
      s = state();
    }
    return s;
  }

 private:
  bool transition(SolverState from, SolverState to) {
    auto expected = from;
    if (!state_.compare_exchange_strong(expected, to, std::memory_order_acq_rel)) return false;
    state_.notify_all();
    return true;
  }

  std::atomic<SolverState> state_{SolverState::Running};
};

}  // namespace flexsat::solver
