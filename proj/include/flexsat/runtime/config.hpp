#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "flexsat/exchange/clause_buffer.hpp"
#include "flexsat/runtime/envelope.hpp"
#include "flexsat/runtime/transport.hpp"

namespace flexsat::runtime {

enum class TransportMode : std::uint8_t { Sim, Real };

/// How a job root grows its demand.
enum class DemandPolicy : std::uint8_t {
  Ramp,  // 1, 2, 4, ... one step per balancing period, up to the cap
  Full,  // the whole budget from the start
};

struct ClusterConfig {
  int nodes = 1;            // m
  int pes_per_node = 4;     // c; p = m * c, the last PE is the client
  int threads = 1;          // t solvers per PE
  double epsilon = 0.0;     // fraction of worker PEs kept idle
  double balance_period_ms = 100;  // e
  exchange::ExchangeConfig exchange;
  bool sharing = true;
  int max_active_jobs = 1;  // J
  std::uint64_t seed = 1;
  TransportMode mode = TransportMode::Sim;
  double timeout_ms = std::numeric_limits<double>::infinity();  // whole run

  DemandPolicy demand = DemandPolicy::Ramp;
  int cache_capacity = 3;
  int graph_degree = 4;
  std::uint64_t size_threshold = 100'000'000;
  LatencyModel latency;
  double sim_props_per_ms = 10'000;  // solver work per simulated millisecond
  double sample_period_ms = 10;
  bool trace_deliveries = true;

  int num_pes() const { return nodes * pes_per_node; }
  int client_pe() const { return num_pes() - 1; }
  int budget() const;

  /// Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
};

/// One job submission.
struct JobSpec {
  std::string name;
  std::shared_ptr<const Cnf> cnf;
  double arrival_ms = 0;
  double priority = 0.5;
  double wallclock_limit_ms = 0;  // 0: none
  int max_volume = 0;             // 0: none
  double synthetic_work_ms = 0;   // > 0: replace solvers by a synthetic workload
  std::vector<std::pair<double, int>> demand_schedule;  // (offset ms, demand)
  double reference_ms = -1;  // sequential reference time for speedups; < 0: none
};

struct Scenario {
  std::vector<JobSpec> jobs;
};

}  // namespace flexsat::runtime
