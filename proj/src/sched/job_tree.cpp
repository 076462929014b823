#include "flexsat/sched/job_tree.hpp"

#include <stdexcept>

namespace flexsat::sched {

VolumeActions apply_volume(const JobTreeNode& node, int v) {
  VolumeActions a;
  for (int side = 0; side < 2; ++side)
    if (node.child_pe[side] != kNoPe) a.forward_to.push_back(node.child_pe[side]);
  if (node.index > 0 && node.index >= v) {
    a.leave = true;
    for (int side = 0; side < 2; ++side)
      if (node.child_pe[side] != kNoPe) a.detach_slots.push_back(side);
    return a;
  }
  for (int side = 0; side < 2; ++side) {
    const bool wanted = node.child_index(side) < v;
    if (node.child_pe[side] != kNoPe) {
      if (!wanted) a.detach_slots.push_back(side);
    } else if (wanted && node.pending_request[side] == 0) {
      a.request_slots.push_back(side);
    }
  }
  return a;
}

JobTreeNode* NodeCache::find(JobId job, int index) {
  auto it = nodes_.find({job, index});
  return it == nodes_.end() ? nullptr : &it->second;
}

const JobTreeNode* NodeCache::find(JobId job, int index) const {
  auto it = nodes_.find({job, index});
  return it == nodes_.end() ? nullptr : &it->second;
}

JobTreeNode* NodeCache::active() {
  for (auto& [k, n] : nodes_)
    if (n.state == NodeState::Active) return &n;
  return nullptr;
}

const JobTreeNode* NodeCache::active() const {
  for (const auto& [k, n] : nodes_)
    if (n.state == NodeState::Active) return &n;
  return nullptr;
}

std::vector<std::pair<JobId, int>> NodeCache::keys_of(JobId job) const {
  std::vector<std::pair<JobId, int>> out;
  for (const auto& [k, n] : nodes_)
    if (k.first == job) out.push_back(k);
  return out;
}

std::vector<std::pair<JobId, int>> NodeCache::keys() const {
  std::vector<std::pair<JobId, int>> out;
  for (const auto& [k, n] : nodes_) out.push_back(k);
  return out;
}

bool NodeCache::can_admit() const {
  return static_cast<int>(nodes_.size()) < capacity_ || eviction_victim().has_value();
}

std::optional<std::pair<JobId, int>> NodeCache::eviction_victim() const {
  if (static_cast<int>(nodes_.size()) < capacity_) return std::nullopt;
  std::optional<std::pair<JobId, int>> best;
  std::uint64_t oldest = 0;
  for (const auto& [k, n] : nodes_) {
    if (n.state != NodeState::Suspended) continue;
    if (!best || n.last_active < oldest) {
      best = k;
      oldest = n.last_active;
    }
  }
  return best;
}

JobTreeNode& NodeCache::insert(const JobTreeNode& node) {
  if (static_cast<int>(nodes_.size()) >= capacity_ && !nodes_.contains({node.job, node.index}))
    throw std::logic_error("node cache full");
  auto& slot = nodes_[{node.job, node.index}];
  slot = node;
  return slot;
}

void NodeCache::erase(JobId job, int index) { nodes_.erase({job, index}); }

RouteDecision route_request(const JobRequest& req, int self, bool idle, std::optional<int> volume,
                            const NodeCache& cache, const FormerChildren& former, const PeGraph& graph,
                            int hop_limit, std::mt19937_64& rng) {
  // stale: the slot is no longer part of the job's tree
  if (req.index > 0 && volume && req.index >= *volume) return {RouteDecision::Drop, kNoPe};
  if (idle) {
    if (cache.find(req.job, req.index)) return {RouteDecision::Resume, self};
    if (cache.can_admit()) return {RouteDecision::Adopt, self};
  }
  if (req.hops >= hop_limit) return {RouteDecision::Park, kNoPe};
  if (auto it = former.find({req.job, req.index}); it != former.end() && it->second != self)
    return {RouteDecision::Forward, it->second};
  return {RouteDecision::Forward, graph.random_neighbor(self, rng)};
}

}  // namespace flexsat::sched
