#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flexsat/exchange/clause_hash.hpp"
#include "flexsat/runtime/pe.hpp"
#include "flexsat/solver/portfolio.hpp"

namespace flexsat::runtime {

using sched::JobTreeNode;
using sched::kNoPe;
using sched::NodeState;

std::vector<std::int32_t> encode_model(const Assignment& a) {
  std::vector<std::int32_t> out;
  out.reserve(static_cast<std::size_t>(a.num_vars()));
  for (int v = 1; v <= a.num_vars(); ++v) out.push_back(a.get(v).value_or(false) ? v : -v);
  return out;
}

Assignment decode_model(const std::vector<std::int32_t>& lits, int num_vars) {
  Assignment a(num_vars);
  for (auto l : lits)
    if (var_of(l) >= 1 && var_of(l) <= num_vars) a.set(var_of(l), l > 0);
  return a;
}

Worker::Worker(int id, const ClusterConfig& cfg, const sched::PeGraph& graph, Transport& net, Trace& trace)
    : id_(id),
      cfg_(cfg),
      graph_(graph),
      net_(net),
      trace_(trace),
      rng_(exchange::mix64(cfg.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(id))),
      budget_(cfg.budget()),
      hop_limit_(sched::max_hops(cfg.num_pes())),
      reducer_(id, cfg.num_pes(), static_cast<std::int64_t>(std::llround(cfg.balance_period_ms * 1000))),
      cache_(cfg.cache_capacity) {}

Worker::~Worker() {
  for (auto& [k, rt] : rt_)
    if (rt.solvers) rt.solvers->terminate();
}

void Worker::send(Envelope env) {
  env.src = id_;
  net_.send(std::move(env));
}

void Worker::log(std::string_view kind, JobId job, std::string_view detail) { trace_.log(now_, id_, kind, job, detail); }

bool Worker::job_done(JobId job) const {
  const auto* ev = ledger_.find(job);
  return ev && ev->demand == 0;
}

std::optional<int> Worker::known_volume(JobId job) const {
  if (!ledger_.find(job)) return std::nullopt;
  return volumes_.of(job);
}

JobTreeNode* Worker::active_node() { return cache_.active(); }

void Worker::on_message(const Envelope& env, std::int64_t now_us) {
  now_ = now_us;
  if (cfg_.trace_deliveries)
    log(kind_name(env.kind), env.kind == MsgKind::EventReduce || env.kind == MsgKind::EventBroadcast ? -1 : env.job,
        fmt::format("src={} x={} e={} n={}", env.src, env.index, env.epoch, env.ints.size()));
  switch (env.kind) {
    case MsgKind::JobRequest: handle_request(env); break;
    case MsgKind::AdoptAck: handle_ack(env); break;
    case MsgKind::JobPayload: handle_payload(env); break;
    case MsgKind::Abort: handle_abort(env); break;
    case MsgKind::VolumeUpdate: handle_volume_update(env); break;
    case MsgKind::EventReduce:
      for (auto& s : reducer_.on_reduce(env, net_)) apply_events(*s);
      break;
    case MsgKind::EventBroadcast: handle_broadcast(env); break;
    case MsgKind::ClausesUp: handle_clauses_up(env); break;
    case MsgKind::ClausesBcast: handle_clauses_bcast(env); break;
    case MsgKind::Result: handle_result(env.job, env.verdict, env.ints, env.flag); break;
  }
  busy_.store(cache_.has_active(), std::memory_order_relaxed);
}

// --- adoption -------------------------------------------------------------

void Worker::handle_request(const Envelope& env) {
  if (job_done(env.job)) {
    log("DROP", env.job, fmt::format("x={} done", env.index));
    return;
  }
  sched::JobRequest req{env.job, env.index, env.hops, env.origin, env.request_id};
  const bool idle = !cache_.has_active() && !reservation_;
  const auto d = sched::route_request(req, id_, idle, known_volume(env.job), cache_, former_, graph_, hop_limit_, rng_);
  switch (d.kind) {
    case sched::RouteDecision::Adopt:
    case sched::RouteDecision::Resume: {
      reservation_ = req;
      Envelope ack;
      ack.kind = MsgKind::AdoptAck;
      ack.dst = req.origin;
      ack.job = req.job;
      ack.index = req.index;
      ack.request_id = req.id;
      ack.value = d.kind == sched::RouteDecision::Resume ? 1 : 0;
      ack.hops = req.hops;
      send(std::move(ack));
      break;
    }
    case sched::RouteDecision::Forward: {
      Envelope fwd = env;
      fwd.dst = d.target;
      fwd.hops = env.hops + 1;
      send(std::move(fwd));
      break;
    }
    case sched::RouteDecision::Park: {
      Envelope park = env;
      park.dst = cfg_.client_pe();
      park.flag = true;
      send(std::move(park));
      break;
    }
    case sched::RouteDecision::Drop: {
      log("DROP", env.job, fmt::format("x={} stale", env.index));
      // tell the parent so it can ask again once its view of the volume agrees
      Envelope notice;
      notice.kind = MsgKind::Abort;
      notice.flag = kAbortReject;
      notice.dst = env.origin;
      notice.job = env.job;
      notice.index = env.index;
      notice.request_id = env.request_id;
      send(std::move(notice));
      break;
    }
  }
}

void Worker::handle_ack(const Envelope& env) {
  // we are the parent of env.index
  auto* node = env.index > 0 ? cache_.find(env.job, sched::parent_index(env.index)) : nullptr;
  const int side = env.index % 2 == 1 ? 0 : 1;
  Envelope reply;
  reply.dst = env.src;
  reply.job = env.job;
  reply.index = env.index;
  if (node && node->state == NodeState::Active && node->pending_request[side] == env.request_id &&
      node->child_pe[side] == kNoPe) {
    auto& rt = rt_.at({node->job, node->index});
    node->pending_request[side] = 0;
    node->child_pe[side] = env.src;
    former_[{env.job, env.index}] = env.src;
    rt.child_first_epoch[side] = rt.share_epoch + 1;
    rt.child_buf[side].reset();
    reply.kind = MsgKind::JobPayload;
    if (env.value == 0) reply.info = rt.info;
    reply.value = node->root_pe;
    reply.origin = id_;
    reply.epoch = rt.share_epoch + 1;
    reply.volume = rt.volume;
  } else {
    reply.kind = MsgKind::Abort;
    reply.flag = kAbortReject;
  }
  send(std::move(reply));
}

void Worker::handle_payload(const Envelope& env) {
  if (!reservation_ || reservation_->job != env.job || reservation_->index != env.index) {
    log("IGNORE", env.job, fmt::format("x={} unexpected payload", env.index));
    return;
  }
  reservation_.reset();
  if (job_done(env.job)) return;
  if (!env.info) {
    auto* node = cache_.find(env.job, env.index);
    if (!node) return;
    auto& rt = rt_.at({env.job, env.index});
    node->state = NodeState::Active;
    node->last_active = static_cast<std::uint64_t>(now_);
    node->parent_pe = env.origin;
    node->root_pe = env.value;
    node->child_pe[0] = node->child_pe[1] = kNoPe;
    node->pending_request[0] = node->pending_request[1] = 0;
    rt.share_epoch = env.epoch;
    rt.sent_epoch = 0;
    rt.last_bcast_us = now_;
    rt.child_buf[0].reset();
    rt.child_buf[1].reset();
    rt.solvers->resume();
    log("RESUME", env.job, fmt::format("x={}", env.index));
    apply_node_volume(*node, initial_volume(env));
    return;
  }
  start_node(env);
}

// A non-root node follows its parent's volume, which may differ from our own
// global map until the current broadcast has reached every PE.
int Worker::initial_volume(const Envelope& payload) const {
  if (payload.index > 0 && payload.volume > 0) return payload.volume;
  return std::max(1, known_volume(payload.job).value_or(1));
}

void Worker::start_node(const Envelope& env) {
  if (auto victim = cache_.eviction_victim()) {
    log("EVICT", victim->first, fmt::format("x={}", victim->second));
    destroy_node(*victim);
  }
  if (!cache_.can_admit()) {
    log("IGNORE", env.job, "cache full");
    return;
  }
  // a stale suspended node for the same slot is replaced
  if (cache_.find(env.job, env.index)) destroy_node({env.job, env.index});

  JobTreeNode node;
  node.job = env.job;
  node.index = env.index;
  node.root_pe = env.index == 0 ? id_ : env.value;
  node.parent_pe = env.index == 0 ? kNoPe : env.origin;
  node.state = NodeState::Active;
  node.last_active = static_cast<std::uint64_t>(now_);
  auto& stored = cache_.insert(node);

  NodeRt rt;
  rt.info = env.info;
  const auto& cnf = *env.info->cnf;
  SolverSetup setup;
  setup.tree_index = env.index;
  setup.threads = solver::throttled_thread_count(cnf.serialized_size(), cfg_.size_threshold, cfg_.threads);
  ++node_counter_;
  setup.nonce = exchange::mix64(cfg_.seed ^ (static_cast<std::uint64_t>(id_) << 48) ^
                                (static_cast<std::uint64_t>(env.job) << 24) ^ node_counter_);
  const int max_round = exchange::buffer_limit(std::max(1, budget_), cfg_.exchange);
  setup.ring_capacity = solver::ImportRing::capacity_for(static_cast<std::size_t>(max_round));
  setup.filter_bits_log2 = cfg_.exchange.filter_bits_log2;
  setup.filter_half_life_s = std::isfinite(cfg_.exchange.half_life_s) ? cfg_.exchange.half_life_s : 0;
  setup.max_export_length = cfg_.exchange.max_clause_length.value_or(1 << 30);
  setup.synthetic_work = env.info->synthetic_work_ms * cfg_.sim_props_per_ms;
  setup.synthetic_pace = cfg_.mode == TransportMode::Real ? cfg_.sim_props_per_ms : 0;
  setup.threaded = cfg_.mode == TransportMode::Real;
  rt.solvers = std::make_unique<NodeSolvers>(env.info->cnf, setup);
  rt.share_epoch = env.index == 0 ? 1 : env.epoch;
  rt.last_bcast_us = now_;
  rt.gate = exchange::LbdGate(cfg_.exchange.lbd_gate.enabled, cfg_.exchange.lbd_gate.initial_limit);
  rt.forget_seed = setup.nonce;
  rt.demand = env.info->initial_demand;
  rt.demand_epoch = 1;
  rt_.emplace(Key{env.job, env.index}, std::move(rt));
  log("START", env.job, fmt::format("x={} threads={}", env.index, setup.threads));
  apply_node_volume(stored, initial_volume(env));
}

void Worker::destroy_node(const Key& key) {
  if (auto it = rt_.find(key); it != rt_.end()) {
    if (it->second.solvers) it->second.solvers->terminate();
    rt_.erase(it);
  }
  cache_.erase(key.first, key.second);
}

void Worker::handle_abort(const Envelope& env) {
  if (env.flag == kAbortReject) {
    if (reservation_ && reservation_->job == env.job && reservation_->index == env.index) reservation_.reset();
    if (env.request_id != 0 && env.index > 0) request_dropped(env.job, env.index, env.request_id);
    return;
  }
  auto* node = cache_.find(env.job, env.index);
  if (!node) return;
  for (int side = 0; side < 2; ++side) {
    if (node->child_pe[side] == kNoPe) continue;
    Envelope down;
    down.kind = MsgKind::Abort;
    down.flag = kAbortJob;
    down.dst = node->child_pe[side];
    down.job = env.job;
    down.index = node->child_index(side);
    send(std::move(down));
  }
  log("STOP", env.job, fmt::format("x={}", env.index));
  destroy_node({env.job, env.index});
}

void Worker::request_dropped(JobId job, int index, std::uint64_t request_id) {
  auto* node = cache_.find(job, sched::parent_index(index));
  const int side = index % 2 == 1 ? 0 : 1;
  if (!node || node->state != NodeState::Active || node->pending_request[side] != request_id) return;
  node->pending_request[side] = 0;
  if (index < rt_.at({job, node->index}).volume) {
    const std::uint64_t rid = (static_cast<std::uint64_t>(id_) << 40) | ++request_counter_;
    node->pending_request[side] = rid;
    emit_request(job, index, rid);
  }
}

void Worker::emit_request(JobId job, int index, std::uint64_t request_id) {
  sched::JobRequest req{job, index, 0, id_, request_id};
  // The local PE is busy with this job, so the request leaves right away. The
  // parent's volume may be ahead of our global map here; receivers judge staleness.
  const auto d = sched::route_request(req, id_, false, std::nullopt, cache_, former_, graph_, hop_limit_, rng_);
  if (d.kind != sched::RouteDecision::Forward) return;
  Envelope env;
  env.kind = MsgKind::JobRequest;
  env.dst = d.target;
  env.job = job;
  env.index = index;
  env.hops = 1;
  env.origin = id_;
  env.request_id = request_id;
  send(std::move(env));
}

// --- volumes ----------------------------------------------------------------

void Worker::apply_node_volume(JobTreeNode& node, int v) {
  if (node.state != NodeState::Active) return;
  auto& rt = rt_.at({node.job, node.index});
  rt.volume = v;
  const auto acts = sched::apply_volume(node, v);
  for (int side = 0; side < 2; ++side) {
    if (node.child_pe[side] == kNoPe) continue;
    Envelope up;
    up.kind = MsgKind::VolumeUpdate;
    up.dst = node.child_pe[side];
    up.job = node.job;
    up.index = node.child_index(side);
    up.value = v;
    send(std::move(up));
  }
  for (int side : acts.detach_slots) {
    node.child_pe[side] = kNoPe;
    rt.child_buf[side].reset();
  }
  // requests for slots beyond the volume are abandoned
  for (int side = 0; side < 2; ++side)
    if (node.child_index(side) >= v) node.pending_request[side] = 0;
  if (acts.leave) {
    node.state = NodeState::Suspended;
    node.last_active = static_cast<std::uint64_t>(now_);
    node.parent_pe = kNoPe;
    rt.solvers->suspend();
    log("SUSPEND", node.job, fmt::format("x={} v={}", node.index, v));
    return;
  }
  for (int side : acts.request_slots) {
    const std::uint64_t rid = (static_cast<std::uint64_t>(id_) << 40) | ++request_counter_;
    node.pending_request[side] = rid;
    emit_request(node.job, node.child_index(side), rid);
  }
}

void Worker::handle_volume_update(const Envelope& env) {
  auto* node = cache_.find(env.job, env.index);
  if (!node || node->state != NodeState::Active) return;
  apply_node_volume(*node, env.value);
}

void Worker::handle_broadcast(const Envelope& env) {
  reducer_.forward_broadcast(env, net_);
  if (env.events) apply_events(*env.events);
}

void Worker::apply_events(const sched::EventSet& delta) {
  ledger_.merge(delta);
  for (const auto& [job, ev] : delta.events()) {
    if (ev.demand != 0) continue;
    for (const auto& key : cache_.keys_of(job)) destroy_node(key);
    for (auto it = former_.begin(); it != former_.end();) it = it->first.first == job ? former_.erase(it) : std::next(it);
    if (reservation_ && reservation_->job == job) reservation_.reset();
  }
  volumes_ = sched::compute_volumes(ledger_.active_jobs(), budget_);
  log("VOLMAP", -1, fmt::format("{:016x}", sched::digest(volumes_)));
  if (auto* node = active_node(); node && node->index == 0) apply_node_volume(*node, std::max(1, volumes_.of(node->job)));
}

void Worker::update_root_demand() {
  auto* node = active_node();
  if (!node || node->index != 0) return;
  auto& rt = rt_.at({node->job, 0});
  if (rt.result_reported) return;
  const auto& info = *rt.info;
  int cap = budget_;
  if (info.max_volume > 0) cap = std::min(cap, info.max_volume);
  int want = rt.demand;
  if (!info.demand_schedule.empty()) {
    const auto elapsed = now_ - info.arrival_us;
    for (const auto& [offset, d] : info.demand_schedule)
      if (offset <= elapsed) want = d;
  } else if (cfg_.demand == DemandPolicy::Ramp) {
    want = std::min(cap, std::max(1, rt.demand * 2));
  } else {
    want = cap;
  }
  want = std::clamp(want, 1, std::max(1, cap));
  if (want == rt.demand) return;
  rt.demand = want;
  ++rt.demand_epoch;
  reducer_.add_local({node->job, rt.demand_epoch, want, info.priority, info.arrival_us});
  log("DEMAND", node->job, fmt::format("d={} e={}", want, rt.demand_epoch));
}

// --- results ----------------------------------------------------------------

void Worker::handle_result(JobId job, solver::Verdict verdict, std::vector<std::int32_t> model, bool cancel) {
  auto* node = cache_.find(job, 0);
  if (!node) return;
  auto& rt = rt_.at({job, 0});
  if (!cancel) {
    Envelope res;
    res.kind = MsgKind::Result;
    res.dst = cfg_.client_pe();
    res.job = job;
    res.verdict = verdict;
    res.ints = std::move(model);
    send(std::move(res));
    reducer_.add_local({job, rt.demand_epoch + 1, 0, rt.info->priority, rt.info->arrival_us});
  }
  log("FINISH", job, fmt::format("{}{}", solver::to_string(verdict), cancel ? " cancel" : ""));
  Envelope abort;
  abort.kind = MsgKind::Abort;
  abort.flag = kAbortJob;
  abort.dst = id_;
  abort.job = job;
  abort.index = 0;
  // tear down the local root and propagate through the tree
  handle_abort(abort);
}

// --- clause sharing -----------------------------------------------------------

exchange::ClauseBuffer Worker::collect_export(NodeRt& rt) {
  std::vector<Clause> admitted;
  const auto& ex = cfg_.exchange;
  for (auto& e : rt.solvers->drain_exports()) {
    if (ex.max_clause_length && static_cast<int>(e.lits.size()) > *ex.max_clause_length) continue;
    if (!rt.gate.admits(e.lits.size(), e.lbd)) continue;
    auto c = Clause::make(std::move(e.lits), e.lbd);
    if (!c) continue;
    if (!rt.solvers->filter(static_cast<std::size_t>(e.solver)).register_export(*c)) continue;
    admitted.push_back(std::move(*c));
  }
  auto buf = exchange::serialize(std::move(admitted));
  const exchange::ClauseBuffer* in[] = {&buf};
  auto limited = exchange::merge_limited(in, 1, static_cast<std::size_t>(ex.beta)).buffer;
  rt.gate.update(static_cast<double>(limited.size()) / ex.beta);
  return limited;
}

void Worker::import_buffer(NodeRt& rt, const exchange::ClauseBuffer& buf) {
  std::vector<Clause> clauses;
  try {
    clauses = exchange::deserialize(buf);
  } catch (const exchange::BufferFormatError&) {
    return;
  }
  for (std::size_t i = 0; i < rt.solvers->size(); ++i) {
    if (rt.solvers->config(i).kind != solver::SolverKind::Cdcl) continue;
    auto& filter = rt.solvers->filter(i);
    auto& ring = rt.solvers->ring(i);
    for (const auto& c : clauses)
      if (filter.check_import(c)) ring.push(c.lits(), static_cast<int>(c.size()));
  }
}

void Worker::share_tick(JobTreeNode& node, NodeRt& rt) {
  const auto period = static_cast<std::int64_t>(std::llround(cfg_.exchange.share_period_s * 1e6));
  if (now_ < rt.last_bcast_us + period) return;
  if (!cfg_.sharing) {
    rt.solvers->drain_exports();
    rt.last_bcast_us = now_;
    return;
  }
  if (rt.sent_epoch >= rt.share_epoch) return;  // waiting for the broadcast
  bool all_in = true;
  for (int side = 0; side < 2; ++side)
    if (node.child_pe[side] != kNoPe && rt.child_first_epoch[side] <= rt.share_epoch && !rt.child_buf[side])
      all_in = false;
  // missing children do not stall the tree forever
  if (!all_in && now_ < rt.last_bcast_us + 2 * period) return;

  auto own = collect_export(rt);
  std::vector<exchange::MergeInput> children;
  for (int side = 0; side < 2; ++side)
    if (rt.child_buf[side]) children.push_back(std::move(*rt.child_buf[side]));
  rt.child_buf[0].reset();
  rt.child_buf[1].reset();
  auto merged = exchange::merge(children, own, cfg_.exchange);

  if (node.index == 0) {
    log("SHARE", node.job,
        fmt::format("e={} u={} size={} limit={}", rt.share_epoch, merged.meta.u, merged.buffer.size(),
                    exchange::buffer_limit(merged.meta.u, cfg_.exchange)));
    for (int side = 0; side < 2; ++side) {
      if (node.child_pe[side] == kNoPe) continue;
      Envelope down;
      down.kind = MsgKind::ClausesBcast;
      down.dst = node.child_pe[side];
      down.job = node.job;
      down.index = node.child_index(side);
      down.epoch = rt.share_epoch;
      down.ints = merged.buffer.data;
      send(std::move(down));
    }
    import_buffer(rt, merged.buffer);
    ++rt.share_epoch;
    rt.last_bcast_us = now_;
  } else {
    Envelope up;
    up.kind = MsgKind::ClausesUp;
    up.dst = node.parent_pe;
    up.job = node.job;
    up.index = node.index;
    up.epoch = rt.share_epoch;
    up.value = merged.meta.u;
    up.ints = std::move(merged.buffer.data);
    send(std::move(up));
    rt.sent_epoch = rt.share_epoch;
  }
}

void Worker::handle_clauses_up(const Envelope& env) {
  auto* node = active_node();
  if (!node || node->job != env.job || env.index <= 0 || node->index != sched::parent_index(env.index)) return;
  auto& rt = rt_.at({node->job, node->index});
  const int side = env.index % 2 == 1 ? 0 : 1;
  if (node->child_pe[side] != env.src || env.epoch != rt.share_epoch) {
    log("STALE", env.job, fmt::format("x={} e={} want={}", env.index, env.epoch, rt.share_epoch));
    return;
  }
  rt.child_buf[side] = exchange::MergeInput{exchange::ClauseBuffer{env.ints}, exchange::AggregationMeta{env.value}};
}

void Worker::handle_clauses_bcast(const Envelope& env) {
  auto* node = active_node();
  if (!node || node->job != env.job || node->index != env.index) return;
  auto& rt = rt_.at({node->job, node->index});
  if (env.epoch + 1 < rt.share_epoch) return;
  for (int side = 0; side < 2; ++side) {
    if (node->child_pe[side] == kNoPe) continue;
    Envelope down = env;
    down.dst = node->child_pe[side];
    down.index = node->child_index(side);
    send(std::move(down));
  }
  import_buffer(rt, exchange::ClauseBuffer{env.ints});
  rt.share_epoch = std::max(rt.share_epoch, env.epoch + 1);
  rt.last_bcast_us = now_;
  rt.child_buf[0].reset();
  rt.child_buf[1].reset();
}

// --- timers -----------------------------------------------------------------

void Worker::on_tick(std::int64_t now_us) {
  now_ = now_us;
  const auto dt = now_us - last_tick_;
  last_tick_ = now_us;
  const auto before = reducer_.next_round_time();
  if (now_us >= before) update_root_demand();
  for (auto& s : reducer_.on_tick(now_us, net_)) apply_events(*s);

  if (auto* node = active_node()) {
    auto& rt = rt_.at({node->job, node->index});
    std::optional<solver::SolveResult> result;
    if (cfg_.mode == TransportMode::Sim) {
      const auto work = static_cast<std::uint64_t>(std::max<double>(1.0, cfg_.sim_props_per_ms * static_cast<double>(dt) / 1000.0));
      result = rt.solvers->step(work);
    } else {
      result = rt.solvers->poll();
    }
    if (result && !rt.result_reported) {
      rt.result_reported = true;
      std::vector<std::int32_t> model;
      if (result->model) model = encode_model(*result->model);
      log("SOLVED", node->job, fmt::format("x={} {}", node->index, solver::to_string(result->verdict)));
      if (node->index == 0) {
        handle_result(node->job, result->verdict, std::move(model), false);
        busy_.store(cache_.has_active(), std::memory_order_relaxed);
        return;
      }
      Envelope res;
      res.kind = MsgKind::Result;
      res.dst = node->root_pe;
      res.job = node->job;
      res.index = node->index;
      res.verdict = result->verdict;
      res.ints = std::move(model);
      send(std::move(res));
    }
    share_tick(*node, rt);
    if (std::isfinite(cfg_.exchange.half_life_s))
      for (std::size_t i = 0; i < rt.solvers->size(); ++i)
        rt.solvers->filter(i).maybe_forget(static_cast<double>(now_us) / 1e6, rt.forget_seed + i + static_cast<std::uint64_t>(now_us));
  }
  busy_.store(cache_.has_active(), std::memory_order_relaxed);
}

}  // namespace flexsat::runtime
