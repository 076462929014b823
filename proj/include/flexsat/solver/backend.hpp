#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "flexsat/formula/cnf.hpp"
#include "flexsat/solver/cdcl.hpp"
#include "flexsat/solver/control.hpp"
#include "flexsat/solver/import_ring.hpp"
#include "flexsat/solver/portfolio.hpp"
#include "flexsat/solver/sls.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::solver {

/// Narrow interface every portfolio member implements, so that external
/// solvers can be adapted later.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;

  /// Advances the search by one slice of work.
  virtual Verdict step(const StepLimits& limits) = 0;
  virtual SolveResult result() const = 0;
  /// Whether an Unsat verdict can ever come out of this backend.
  virtual bool can_refute() const = 0;
  /// True once the backend will make no further progress.
  virtual bool exhausted() const { return false; }
};

class CdclBackend final : public SolverBackend {
 public:
  CdclBackend(const Cnf& cnf, const SolverConfig& cfg, ImportRing* ring, ExportSink* sink);
  Verdict step(const StepLimits& limits) override { return engine_.run(limits); }
  SolveResult result() const override;
  bool can_refute() const override { return true; }

 private:
  CdclEngine engine_;
};

class SlsBackend final : public SolverBackend {
 public:
  SlsBackend(const Cnf& cnf, const SolverConfig& cfg);
  Verdict step(const StepLimits& limits) override { return engine_.run(limits); }
  SolveResult result() const override;
  bool can_refute() const override { return false; }
  bool exhausted() const override { return engine_.stuck(); }

 private:
  SlsEngine engine_;
};

/// Workload stand-in for scheduling experiments: consumes a seeded amount
/// of work, between 0.5 and 1.5 times `work_units`, then decides the
/// (small) formula with a plain CDCL run so that the verdict is genuine.
/// With `pace_units_per_ms` > 0, work is also paced in wall-clock time.
class SyntheticBackend final : public SolverBackend {
 public:
  SyntheticBackend(const Cnf& cnf, double work_units, std::uint64_t seed, double pace_units_per_ms = 0);
  Verdict step(const StepLimits& limits) override;
  SolveResult result() const override { return result_; }
  bool can_refute() const override { return true; }

  double progress() const { return done_; }
  double target() const { return target_; }

 private:
  const Cnf* cnf_;
  double target_;
  double done_ = 0;
  double pace_;
  std::uint64_t seed_;
  SolveResult result_;
};

std::unique_ptr<SolverBackend> make_backend(const Cnf& cnf, const SolverConfig& cfg, ImportRing* ring,
                                            ExportSink* sink);

/// Slice size used by the blocking drivers; the control cell is polled
/// after every slice.
inline constexpr StepLimits kPreemptionSlice{1, 10'000};

/// Drives `backend` until it reaches a verdict, stops making progress or is
/// terminated. Parks without spinning while the control cell is suspended.
SolveResult run_backend(SolverBackend& backend, SolverControl& control, const StepLimits& slice = kPreemptionSlice);

SolveResult cdcl_solve(const Cnf& cnf, const SolverConfig& cfg, SolverControl& control, ImportRing* ring,
                       ExportSink* sink);

/// Local search; returns Sat with a model or Unknown, never Unsat.
SolveResult sls_solve(const Cnf& cnf, const SolverConfig& cfg, SolverControl& control);

}  // namespace flexsat::solver
