#include "flexsat/sched/events.hpp"

namespace flexsat::sched {

bool EventSet::add(const BalancingEvent& ev) {
  auto [it, inserted] = events_.try_emplace(ev.job, ev);
  if (inserted) return true;
  if (ev.epoch <= it->second.epoch) return false;
  // a completed job stays completed
  if (it->second.demand == 0) return false;
  it->second = ev;
  return true;
}

bool EventSet::merge(const EventSet& other) {
  bool changed = false;
  for (const auto& [id, ev] : other.events_) changed = add(ev) || changed;
  return changed;
}

const BalancingEvent* EventSet::find(JobId job) const {
  auto it = events_.find(job);
  return it == events_.end() ? nullptr : &it->second;
}

std::vector<JobDemand> EventSet::active_jobs() const {
  std::vector<JobDemand> out;
  for (const auto& [id, ev] : events_)
    if (ev.demand > 0) out.push_back(JobDemand{id, ev.priority, ev.demand, ev.arrival});
  return out;
}

}  // namespace flexsat::sched
