#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "flexsat/exchange/clause_buffer.hpp"
#include "flexsat/exchange/clause_filter.hpp"
#include "flexsat/runtime/config.hpp"
#include "flexsat/runtime/envelope.hpp"
#include "flexsat/runtime/node_solvers.hpp"
#include "flexsat/runtime/trace.hpp"
#include "flexsat/runtime/transport.hpp"
#include "flexsat/sched/events.hpp"
#include "flexsat/sched/job_tree.hpp"
#include "flexsat/sched/pe_graph.hpp"
#include "flexsat/sched/volumes.hpp"

namespace flexsat::runtime {

/// Periodic reduce-and-broadcast of balancing events over a static binary
/// tree of all PE ids rooted at PE 0. Every PE contributes once per period,
/// possibly with nothing; the root broadcasts only nonempty results.
class EventReducer {
 public:
  EventReducer(int self, int num_pes, std::int64_t period_us);

  void add_local(const sched::BalancingEvent& ev) { pending_.add(ev); }

  /// Contributes the local events for every period boundary passed. Returns
  /// an event set to apply locally if this PE is the root and a round closed.
  std::vector<std::shared_ptr<const sched::EventSet>> on_tick(std::int64_t now_us, Transport& net);
  std::vector<std::shared_ptr<const sched::EventSet>> on_reduce(const Envelope& env, Transport& net);
  /// Forwards a broadcast to the tree children; the caller applies it.
  void forward_broadcast(const Envelope& env, Transport& net) const;

  std::int64_t next_round_time() const { return (round_ + 1) * period_us_; }

 private:
  struct Round {
    sched::EventSet events;
    int arrived = 0;
    bool own = false;
  };
  std::vector<std::shared_ptr<const sched::EventSet>> try_close(std::int64_t round, Transport& net);
  int children() const;

  int self_;
  int num_pes_;
  std::int64_t period_us_;
  std::int64_t round_ = 0;  // last round contributed
  sched::EventSet pending_;
  std::map<std::int64_t, Round> rounds_;
};

/// A worker PE: hosts at most one active job node plus suspended ones.
class Worker {
 public:
  Worker(int id, const ClusterConfig& cfg, const sched::PeGraph& graph, Transport& net, Trace& trace);
  ~Worker();

  void on_message(const Envelope& env, std::int64_t now_us);
  void on_tick(std::int64_t now_us);

  int id() const { return id_; }
  bool busy() const { return busy_.load(std::memory_order_relaxed); }
  const sched::VolumeMap& volumes() const { return volumes_; }
  std::size_t cached_nodes() const { return cache_.size(); }

 private:
  struct NodeRt {
    std::shared_ptr<const JobInfo> info;
    std::unique_ptr<NodeSolvers> solvers;
    bool result_reported = false;
    std::int64_t share_epoch = 1;
    std::int64_t sent_epoch = 0;
    std::int64_t last_bcast_us = 0;
    std::int64_t child_first_epoch[2] = {0, 0};
    std::optional<exchange::MergeInput> child_buf[2];
    exchange::LbdGate gate;
    std::uint64_t forget_seed = 0;
    int volume = 1;  // last volume applied to this node
    // root bookkeeping
    int demand = 1;
    std::int64_t demand_epoch = 1;
  };
  using Key = std::pair<JobId, int>;

  void send(Envelope env);
  void log(std::string_view kind, JobId job, std::string_view detail);
  std::optional<int> known_volume(JobId job) const;
  bool job_done(JobId job) const;

  void handle_request(const Envelope& env);
  void handle_ack(const Envelope& env);
  void handle_payload(const Envelope& env);
  void handle_abort(const Envelope& env);
  int initial_volume(const Envelope& payload) const;
  void request_dropped(JobId job, int index, std::uint64_t request_id);
  void handle_volume_update(const Envelope& env);
  void handle_broadcast(const Envelope& env);
  void apply_events(const sched::EventSet& delta);
  void handle_clauses_up(const Envelope& env);
  void handle_clauses_bcast(const Envelope& env);
  void handle_result(JobId job, solver::Verdict verdict, std::vector<std::int32_t> model, bool cancel);

  void emit_request(JobId job, int index, std::uint64_t request_id);
  void apply_node_volume(sched::JobTreeNode& node, int v);
  void start_node(const Envelope& env);
  void destroy_node(const Key& key);
  void update_root_demand();
  void share_tick(sched::JobTreeNode& node, NodeRt& rt);
  exchange::ClauseBuffer collect_export(NodeRt& rt);
  void import_buffer(NodeRt& rt, const exchange::ClauseBuffer& buf);
  sched::JobTreeNode* active_node();

  int id_;
  const ClusterConfig& cfg_;
  const sched::PeGraph& graph_;
  Transport& net_;
  Trace& trace_;
  std::mt19937_64 rng_;
  std::int64_t now_ = 0;
  std::int64_t last_tick_ = 0;
  int budget_;
  int hop_limit_;

  EventReducer reducer_;
  sched::EventSet ledger_;
  sched::VolumeMap volumes_;

  sched::NodeCache cache_;
  std::map<Key, NodeRt> rt_;
  sched::FormerChildren former_;
  std::optional<sched::JobRequest> reservation_;
  std::uint64_t request_counter_ = 0;
  std::uint64_t node_counter_ = 0;
  std::atomic<bool> busy_{false};
};

struct JobOutcome {
  JobId id = 0;
  std::string name;
  solver::Verdict verdict = solver::Verdict::Unknown;
  std::optional<Assignment> model;
  bool model_ok = false;
  bool timed_out = false;
  std::int64_t arrival_us = 0;
  std::int64_t intro_us = -1;
  std::int64_t scheduled_us = -1;
  std::int64_t done_us = -1;
};

/// The client PE: introduces jobs (at most J at a time), parks exhausted
/// requests, and collects first results.
class Client {
 public:
  Client(int id, const ClusterConfig& cfg, const Scenario& scenario, Transport& net, Trace& trace);

  void on_message(const Envelope& env, std::int64_t now_us);
  void on_tick(std::int64_t now_us);

  bool finished() const { return done_count_ == jobs_.size(); }
  int active_jobs() const { return active_.load(std::memory_order_relaxed); }
  const std::vector<JobOutcome>& outcomes() const { return outcomes_; }
  /// Marks every unfinished job as timed out (end of run).
  void expire_all(std::int64_t now_us);

 private:
  struct JobState {
    std::shared_ptr<JobInfo> info;
    double limit_ms = 0;
    double reference_ms = -1;
    bool introduced = false;
    bool done = false;
    int root_pe = -1;
    std::uint64_t request_id = 0;
  };

  void send(Envelope env);
  void log(std::string_view kind, JobId job, std::string_view detail);
  void introduce(JobState& job);
  void finish(JobState& job, solver::Verdict v, std::optional<Assignment> model, bool timed_out);
  void send_root_request(JobState& job, int hops);

  int id_;
  const ClusterConfig& cfg_;
  Transport& net_;
  Trace& trace_;
  std::mt19937_64 rng_;
  std::int64_t now_ = 0;
  int budget_;
  std::vector<JobState> jobs_;
  std::vector<JobOutcome> outcomes_;
  std::size_t next_arrival_ = 0;
  std::vector<std::size_t> waiting_;
  std::vector<Envelope> parked_;
  std::size_t done_count_ = 0;
  std::atomic<int> active_{0};

  EventReducer reducer_;
  sched::EventSet ledger_;
  sched::VolumeMap volumes_;
};

/// Demand-0 events from the client use this epoch so they beat any demand
/// update from the job root.
inline constexpr std::int64_t kCancelEpoch = std::int64_t{1} << 40;

std::vector<std::int32_t> encode_model(const Assignment& a);
Assignment decode_model(const std::vector<std::int32_t>& lits, int num_vars);

}  // namespace flexsat::runtime
