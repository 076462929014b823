#include "flexsat/runtime/node_solvers.hpp"

#include <limits>

namespace flexsat::runtime {

NodeSolvers::NodeSolvers(std::shared_ptr<const Cnf> cnf, const SolverSetup& setup)
    : cnf_(std::move(cnf)), threaded_(setup.threaded) {
  const double half_life = setup.filter_half_life_s > 0 ? setup.filter_half_life_s
                                                        : std::numeric_limits<double>::infinity();
  for (int i = 0; i < setup.threads; ++i) {
    auto slot = std::make_unique<Slot>(setup.ring_capacity, setup.filter_bits_log2, half_life);
    slot->config = solver::make_portfolio_config(setup.tree_index, setup.threads, i, setup.nonce);
    slot->config.cdcl.max_export_length = setup.max_export_length;
    slot->sink = std::make_unique<solver::ExportQueue::Sink>(exports_, i);
    if (setup.synthetic_work > 0)
      slot->backend = std::make_unique<solver::SyntheticBackend>(*cnf_, setup.synthetic_work, slot->config.seed,
                                                                 setup.synthetic_pace);
    else
      slot->backend = solver::make_backend(*cnf_, slot->config, &slot->ring, slot->sink.get());
    slots_.push_back(std::move(slot));
  }
  if (threaded_) {
    for (auto& s : slots_) {
      Slot* slot = s.get();
      slot->thread = std::thread([this, slot] {
        auto r = solver::run_backend(*slot->backend, slot->control);
        if (r.verdict == solver::Verdict::Unknown) return;
        std::lock_guard lock(result_mutex_);
        if (!result_) {
          result_ = std::move(r);
          has_result_.store(true, std::memory_order_release);
        }
      });
    }
  }
}

NodeSolvers::~NodeSolvers() { terminate(); }

void NodeSolvers::suspend() {
  if (terminated_ || suspended_) return;
  suspended_ = true;
  for (auto& s : slots_) s->control.suspend();
}

void NodeSolvers::resume() {
  if (terminated_ || !suspended_) return;
  suspended_ = false;
  for (auto& s : slots_) s->control.resume();
}

void NodeSolvers::terminate() {
  if (terminated_) return;
  terminated_ = true;
  for (auto& s : slots_) s->control.terminate();
  for (auto& s : slots_)
    if (s->thread.joinable()) s->thread.join();
}

std::optional<solver::SolveResult> NodeSolvers::step(std::uint64_t work) {
  if (terminated_ || suspended_) return std::nullopt;
  for (auto& s : slots_) {
    if (s->done) continue;
    const auto v = s->backend->step(solver::StepLimits{std::numeric_limits<std::uint64_t>::max(), work});
    if (v != solver::Verdict::Unknown) {
      s->done = true;
      return s->backend->result();
    }
    if (s->backend->exhausted()) s->done = true;
  }
  return std::nullopt;
}

std::optional<solver::SolveResult> NodeSolvers::poll() {
  if (!has_result_.load(std::memory_order_acquire)) return std::nullopt;
  std::lock_guard lock(result_mutex_);
  auto r = std::move(result_);
  result_.reset();
  has_result_.store(false, std::memory_order_release);
  return r;
}

std::uint64_t NodeSolvers::total_work() const {
  std::uint64_t w = 0;
  if (threaded_) return w;  // stats are owned by the solver threads
  for (const auto& s : slots_) w += s->backend->result().stats.propagations;
  return w;
}

}  // namespace flexsat::runtime
