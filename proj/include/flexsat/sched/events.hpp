#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "flexsat/sched/volumes.hpp"

namespace flexsat::sched {

/// Demand change of one job. Demand 0 marks completion and is terminal.
struct BalancingEvent {
  JobId job = 0;
  std::int64_t epoch = 0;  // strictly increasing per job
  int demand = 0;
  double priority = 0.5;
  std::int64_t arrival = 0;

  friend bool operator==(const BalancingEvent&, const BalancingEvent&) = default;
};

/// Per-job latest event. Merging keeps the event with the larger epoch, so
/// reduction order does not matter.
class EventSet {
 public:
  /// Returns true if the set changed.
  bool add(const BalancingEvent& ev);
  bool merge(const EventSet& other);

  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }
  void clear() { events_.clear(); }
  const std::map<JobId, BalancingEvent>& events() const { return events_; }
  const BalancingEvent* find(JobId job) const;

  /// Jobs with positive demand, as balancer input.
  std::vector<JobDemand> active_jobs() const;

  friend bool operator==(const EventSet&, const EventSet&) = default;

 private:
  std::map<JobId, BalancingEvent> events_;
};

}  // namespace flexsat::sched
