#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace flexsat::sched {

using JobId = std::int64_t;

/// What the balancer knows about an active job.
struct JobDemand {
  JobId id = 0;
  double priority = 0.5;     // in (0,1)
  int demand = 1;            // >= 1
  std::int64_t arrival = 0;  // any monotone clock, only used for tie-breaking
};

struct VolumeMap {
  std::map<JobId, int> volumes;
  // jobs that did not fit into the budget and got volume 0
  std::vector<JobId> waiting;

  int of(JobId id) const {
    auto it = volumes.find(id);
    return it == volumes.end() ? 0 : it->second;
  }
  int total() const;
  friend bool operator==(const VolumeMap&, const VolumeMap&) = default;
};

/// PEs available for jobs: floor((1 - eps) * (p - clients)), but at least
/// one while a worker exists.
int volume_budget(int num_pes, double epsilon, int num_clients);

/// Tie order for rounding and admission: priority descending, then arrival,
/// then id.
bool tie_before(const JobDemand& a, const JobDemand& b);

/// Real-valued shares: every job gets clamp(lambda * priority * demand, 1,
/// demand) with lambda chosen so the shares sum to min(budget, sum of
/// demands). Requires budget >= jobs.size().
std::vector<double> water_fill(std::span<const JobDemand> jobs, int budget);

/// Deterministic integer volumes: water-filled shares rounded by largest
/// remainder. If there are more jobs than budget, the first `budget` jobs
/// in tie order get volume 1 and the rest 0 (listed in `waiting`).
VolumeMap compute_volumes(std::span<const JobDemand> jobs, int budget);

/// Order-independent digest of a volume map, for cross-PE consistency checks.
std::uint64_t digest(const VolumeMap& map);

}  // namespace flexsat::sched
