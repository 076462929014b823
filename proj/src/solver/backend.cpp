#include "flexsat/solver/backend.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "flexsat/exchange/clause_hash.hpp"

namespace flexsat::solver {

CdclBackend::CdclBackend(const Cnf& cnf, const SolverConfig& cfg, ImportRing* ring, ExportSink* sink)
    : engine_(cnf, cfg.cdcl, cfg.seed) {
  engine_.set_import_ring(ring);
  engine_.set_export_sink(sink);
}

SolveResult CdclBackend::result() const {
  SolveResult r;
  r.verdict = engine_.verdict();
  r.stats = engine_.stats();
  if (r.verdict == Verdict::Sat) r.model = engine_.model();
  return r;
}

SlsBackend::SlsBackend(const Cnf& cnf, const SolverConfig& cfg) : engine_(cnf, cfg.sls, cfg.seed) {}

SolveResult SlsBackend::result() const {
  SolveResult r;
  r.verdict = engine_.verdict();
  r.stats = engine_.stats();
  if (r.verdict == Verdict::Sat) r.model = engine_.model();
  return r;
}

SyntheticBackend::SyntheticBackend(const Cnf& cnf, double work_units, std::uint64_t seed, double pace_units_per_ms)
    : cnf_(&cnf), pace_(pace_units_per_ms), seed_(seed) {
  const double u = static_cast<double>(exchange::mix64(seed) >> 11) * 0x1.0p-53;
  target_ = work_units * (0.5 + u);
}

Verdict SyntheticBackend::step(const StepLimits& limits) {
  if (result_.verdict != Verdict::Unknown) return result_.verdict;
  const double slice = std::min(static_cast<double>(limits.propagations), target_ - done_);
  if (pace_ > 0 && slice > 0)
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(slice / pace_));
  done_ += std::max(slice, 0.0);
  result_.stats.propagations = static_cast<std::uint64_t>(done_);
  if (done_ < target_) return Verdict::Unknown;
  CdclEngine engine(*cnf_, CdclParams{}, seed_);
  result_.verdict = engine.run(StepLimits{});
  if (result_.verdict == Verdict::Sat) result_.model = engine.model();
  return result_.verdict;
}

std::unique_ptr<SolverBackend> make_backend(const Cnf& cnf, const SolverConfig& cfg, ImportRing* ring,
                                            ExportSink* sink) {
  if (cfg.kind == SolverKind::LocalSearch) return std::make_unique<SlsBackend>(cnf, cfg);
  return std::make_unique<CdclBackend>(cnf, cfg, ring, sink);
}

SolveResult run_backend(SolverBackend& backend, SolverControl& control, const StepLimits& slice) {
  for (;;) {
    const auto state = control.wait_while_suspended();
    if (state == SolverState::Terminated) break;
    const auto verdict = backend.step(slice);
    if (verdict != Verdict::Unknown || backend.exhausted()) break;
  }
  auto r = backend.result();
  if (control.state() == SolverState::Terminated && r.verdict == Verdict::Unknown) r.model.reset();
  return r;
}

SolveResult cdcl_solve(const Cnf& cnf, const SolverConfig& cfg, SolverControl& control, ImportRing* ring,
                       ExportSink* sink) {
  CdclBackend backend(cnf, cfg, ring, sink);
  return run_backend(backend, control);
}

SolveResult sls_solve(const Cnf& cnf, const SolverConfig& cfg, SolverControl& control) {
  SlsBackend backend(cnf, cfg);
  return run_backend(backend, control);
}

}  // namespace flexsat::solver
