#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "flexsat/runtime/config.hpp"
#include "flexsat/runtime/pe.hpp"
#include "flexsat/runtime/trace.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::runtime {

struct ClusterOutcome {
  std::vector<JobOutcome> jobs;
  std::int64_t end_us = 0;
  bool timed_out = false;
  std::uint64_t messages = 0;
};

/// Boots p - 1 worker PEs plus the client and processes the scenario until
/// all jobs are done or the run times out. In simulation mode the outcome
/// and the trace are a deterministic function of (cfg, scenario).
ClusterOutcome run_cluster(const ClusterConfig& cfg, const Scenario& scenario, Trace& trace);

/// A single job on the whole budget; returns the first verdict found.
solver::SolveResult mono_mode(std::shared_ptr<const Cnf> cnf, const ClusterConfig& cfg, Trace& trace);

/// The config used by mono_mode: full demand, no idle reserve, one job.
ClusterConfig mono_config(ClusterConfig cfg);

}  // namespace flexsat::runtime
