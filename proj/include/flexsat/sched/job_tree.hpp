#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "flexsat/sched/pe_graph.hpp"
#include "flexsat/sched/volumes.hpp"

namespace flexsat::sched {

inline constexpr int kNoPe = -1;

inline constexpr int left_child(int x) { return 2 * x + 1; }
inline constexpr int right_child(int x) { return 2 * x + 2; }
inline constexpr int parent_index(int x) { return (x - 1) / 2; }

enum class NodeState : std::uint8_t { Active, Suspended };

/// Scheduling view of one job node p_x(j) on a PE.
struct JobTreeNode {
  JobId job = 0;
  int index = 0;
  int root_pe = kNoPe;
  int parent_pe = kNoPe;
  int child_pe[2] = {kNoPe, kNoPe};
  // a request for the child slot is underway; the id identifies it
  std::uint64_t pending_request[2] = {0, 0};
  NodeState state = NodeState::Active;
  std::uint64_t last_active = 0;  // logical time of the last activity, for LRU

  int child_index(int side) const { return side == 0 ? left_child(index) : right_child(index); }
};

/// Request for a PE to take over node `index` of `job`.
struct JobRequest {
  JobId job = 0;
  int index = 0;
  int hops = 0;
  int origin = kNoPe;  // PE that will hand over the job (parent or client)
  std::uint64_t id = 0;
};

/// What a node must do after learning its job's current volume.
struct VolumeActions {
  bool leave = false;
  // child slots (0 left, 1 right) that need a new request
  std::vector<int> request_slots;
  // child slots whose PE must be detached (index no longer within volume)
  std::vector<int> detach_slots;
  // PEs to forward the volume to (all current children)
  std::vector<int> forward_to;
};

/// Pure decision for node `node` under volume `v`. Root nodes never leave.
VolumeActions apply_volume(const JobTreeNode& node, int v);

/// Remaining hop budget before a request is parked at the client.
inline int max_hops(int num_pes) { return static_cast<int>(std::ceil(32.0 * std::log(std::max(num_pes, 2)))); }

/// Job nodes cached on one PE: at most one Active, the rest Suspended.
class NodeCache {
 public:
  explicit NodeCache(int capacity = 3) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  std::size_t size() const { return nodes_.size(); }

  JobTreeNode* find(JobId job, int index);
  const JobTreeNode* find(JobId job, int index) const;
  JobTreeNode* active();
  const JobTreeNode* active() const;
  bool has_active() const { return active() != nullptr; }
  /// Any cached node of `job` (for destruction on completion).
  std::vector<std::pair<JobId, int>> keys_of(JobId job) const;
  std::vector<std::pair<JobId, int>> keys() const;

  /// Whether a fresh node could be inserted, possibly after evicting.
  bool can_admit() const;
  /// Least-recently active suspended node that insertion would evict, if any.
  std::optional<std::pair<JobId, int>> eviction_victim() const;

  /// Inserts (the caller evicts first if needed). Throws if full.
  JobTreeNode& insert(const JobTreeNode& node);
  void erase(JobId job, int index);

 private:
  int capacity_;
  std::map<std::pair<JobId, int>, JobTreeNode> nodes_;
};

/// Routing decision for an incoming request.
struct RouteDecision {
  enum Kind : std::uint8_t { Adopt, Resume, Forward, Park, Drop } kind = Forward;
  int target = kNoPe;
};

/// Per-PE memory of PEs that once held child nodes, keyed by (job, index).
using FormerChildren = std::map<std::pair<JobId, int>, int>;

/// Decides what PE `self` does with `req`. `idle` means no active node and
/// no pending adoption. `volume` is the job's volume as known locally
/// (nullopt if unknown, e.g. before the first balancing round).
RouteDecision route_request(const JobRequest& req, int self, bool idle, std::optional<int> volume,
                            const NodeCache& cache, const FormerChildren& former, const PeGraph& graph,
                            int hop_limit, std::mt19937_64& rng);

}  // namespace flexsat::sched
