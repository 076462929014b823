#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flexsat/exchange/clause_hash.hpp"
#include "flexsat/runtime/pe.hpp"

namespace flexsat::runtime {

namespace {

std::int64_t to_us(double ms) { return static_cast<std::int64_t>(std::llround(ms * 1000.0)); }

}  // namespace

Client::Client(int id, const ClusterConfig& cfg, const Scenario& scenario, Transport& net, Trace& trace)
    : id_(id),
      cfg_(cfg),
      net_(net),
      trace_(trace),
      rng_(exchange::mix64(cfg.seed ^ 0xc11e47ULL)),
      budget_(cfg.budget()),
      reducer_(id, cfg.num_pes(), to_us(cfg.balance_period_ms)) {
  std::vector<std::size_t> order(scenario.jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // stable by arrival so that equal arrivals keep file order
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scenario.jobs[a].arrival_ms < scenario.jobs[b].arrival_ms;
  });
  for (std::size_t i : order) {
    const auto& spec = scenario.jobs[i];
    JobState js;
    auto info = std::make_shared<JobInfo>();
    info->id = static_cast<JobId>(jobs_.size() + 1);
    info->name = spec.name;
    info->cnf = spec.cnf;
    info->priority = spec.priority;
    info->arrival_us = to_us(spec.arrival_ms);
    info->max_volume = spec.max_volume;
    info->synthetic_work_ms = spec.synthetic_work_ms;
    for (const auto& [off, d] : spec.demand_schedule) info->demand_schedule.emplace_back(to_us(off), d);
    int cap = budget_;
    if (spec.max_volume > 0) cap = std::min(cap, spec.max_volume);
    cap = std::max(cap, 1);
    if (!info->demand_schedule.empty() && info->demand_schedule.front().first <= 0)
      info->initial_demand = std::clamp(info->demand_schedule.front().second, 1, cap);
    else
      info->initial_demand = cfg.demand == DemandPolicy::Full ? cap : 1;
    js.info = std::move(info);
    js.limit_ms = spec.wallclock_limit_ms;
    js.reference_ms = spec.reference_ms;
    JobOutcome out;
    out.id = js.info->id;
    out.name = spec.name;
    out.arrival_us = js.info->arrival_us;
    outcomes_.push_back(std::move(out));
    jobs_.push_back(std::move(js));
  }
}

void Client::send(Envelope env) {
  env.src = id_;
  net_.send(std::move(env));
}

void Client::log(std::string_view kind, JobId job, std::string_view detail) { trace_.log(now_, id_, kind, job, detail); }

void Client::send_root_request(JobState& job, int hops) {
  const int workers = cfg_.num_pes() - 1;
  Envelope env;
  env.kind = MsgKind::JobRequest;
  env.dst = static_cast<int>(rng_() % static_cast<std::uint64_t>(workers));
  env.job = job.info->id;
  env.index = 0;
  env.hops = hops;
  env.origin = id_;
  env.request_id = job.request_id;
  send(std::move(env));
}

void Client::introduce(JobState& job) {
  job.introduced = true;
  active_.fetch_add(1, std::memory_order_relaxed);
  auto& out = outcomes_[static_cast<std::size_t>(job.info->id - 1)];
  out.intro_us = now_;
  job.request_id = static_cast<std::uint64_t>(job.info->id);
  log("INTRO", job.info->id,
      fmt::format("d={} prio={} name={}", job.info->initial_demand, job.info->priority, job.info->name.empty() ? "-" : job.info->name));
  reducer_.add_local({job.info->id, 1, job.info->initial_demand, job.info->priority, job.info->arrival_us});
  send_root_request(job, 0);
}

void Client::finish(JobState& job, solver::Verdict v, std::optional<Assignment> model, bool timed_out) {
  if (job.done) return;
  job.done = true;
  ++done_count_;
  if (job.introduced) active_.fetch_sub(1, std::memory_order_relaxed);
  auto& out = outcomes_[static_cast<std::size_t>(job.info->id - 1)];
  out.verdict = v;
  out.done_us = now_;
  out.timed_out = timed_out;
  if (model) out.model_ok = check_model(*job.info->cnf, *model);
  out.model = std::move(model);
  log("DONE", job.info->id,
      fmt::format("{} resp={} model={}", timed_out ? "TIMEOUT" : std::string(solver::to_string(v)),
                  format_time_ms(now_ - job.info->arrival_us), out.model ? (out.model_ok ? "ok" : "bad") : "-"));
}

void Client::expire_all(std::int64_t now_us) {
  now_ = now_us;
  for (auto& job : jobs_) finish(job, solver::Verdict::Unknown, std::nullopt, true);
}

void Client::on_message(const Envelope& env, std::int64_t now_us) {
  now_ = now_us;
  if (cfg_.trace_deliveries)
    log(kind_name(env.kind), env.kind == MsgKind::EventReduce || env.kind == MsgKind::EventBroadcast ? -1 : env.job,
        fmt::format("src={} x={} e={} n={}", env.src, env.index, env.epoch, env.ints.size()));
  auto* job = env.job >= 1 && static_cast<std::size_t>(env.job) <= jobs_.size() ? &jobs_[static_cast<std::size_t>(env.job - 1)] : nullptr;
  switch (env.kind) {
    case MsgKind::JobRequest:
      // a request that walked too long; retried at the next balancing round
      if (job && !job->done) parked_.push_back(env);
      break;
    case MsgKind::AdoptAck: {
      Envelope reply;
      reply.dst = env.src;
      reply.job = env.job;
      reply.index = env.index;
      if (job && !job->done && job->root_pe < 0 && env.index == 0 && env.request_id == job->request_id) {
        job->root_pe = env.src;
        reply.kind = MsgKind::JobPayload;
        reply.info = job->info;
        reply.value = env.src;
        reply.origin = id_;
        reply.epoch = 1;
        auto& out = outcomes_[static_cast<std::size_t>(env.job - 1)];
        out.scheduled_us = now_;
        log("SCHEDULED", env.job, fmt::format("pe={} latency={} hops={}", env.src, format_time_ms(now_ - out.intro_us), env.hops));
      } else {
        reply.kind = MsgKind::Abort;
        reply.flag = kAbortReject;
      }
      send(std::move(reply));
      break;
    }
    case MsgKind::Result:
      if (job && !job->done) {
        std::optional<Assignment> model;
        if (env.verdict == solver::Verdict::Sat) model = decode_model(env.ints, job->info->cnf->num_vars());
        finish(*job, env.verdict, std::move(model), false);
      }
      break;
    case MsgKind::EventReduce:
      for (auto& s : reducer_.on_reduce(env, net_)) {
        ledger_.merge(*s);
        volumes_ = sched::compute_volumes(ledger_.active_jobs(), budget_);
      }
      break;
    case MsgKind::EventBroadcast: {
      reducer_.forward_broadcast(env, net_);
      if (!env.events) break;
      ledger_.merge(*env.events);
      auto next = sched::compute_volumes(ledger_.active_jobs(), budget_);
      for (const auto& [jid, v] : next.volumes)
        if (volumes_.of(jid) != v || !volumes_.volumes.contains(jid)) log("VOLUME", jid, fmt::format("v={}", v));
      volumes_ = std::move(next);
      log("VOLMAP", -1, fmt::format("{:016x}", sched::digest(volumes_)));
      break;
    }
    default: break;
  }
}

void Client::on_tick(std::int64_t now_us) {
  now_ = now_us;
  const bool round = now_us >= reducer_.next_round_time();
  while (next_arrival_ < jobs_.size() && jobs_[next_arrival_].info->arrival_us <= now_us) {
    const auto& job = jobs_[next_arrival_];
    const double limit = job.limit_ms > 0 ? job.limit_ms : cfg_.timeout_ms;
    log("ARRIVE", job.info->id,
        fmt::format("limit={} seq={}", std::isfinite(limit) ? fmt::format("{:.3f}", limit) : std::string("inf"),
                    job.reference_ms >= 0 ? fmt::format("{:.3f}", job.reference_ms) : std::string("-")));
    waiting_.push_back(next_arrival_++);
  }
  std::size_t w = 0;
  while (w < waiting_.size() && active_jobs() < cfg_.max_active_jobs) introduce(jobs_[waiting_[w++]]);
  waiting_.erase(waiting_.begin(), waiting_.begin() + static_cast<std::ptrdiff_t>(w));

  for (auto& job : jobs_) {
    if (!job.introduced || job.done || job.limit_ms <= 0) continue;
    const auto& out = outcomes_[static_cast<std::size_t>(job.info->id - 1)];
    if (now_us < out.intro_us + to_us(job.limit_ms)) continue;
    finish(job, solver::Verdict::Unknown, std::nullopt, true);
    reducer_.add_local({job.info->id, kCancelEpoch, 0, job.info->priority, job.info->arrival_us});
    if (job.root_pe >= 0) {
      Envelope cancel;
      cancel.kind = MsgKind::Result;
      cancel.dst = job.root_pe;
      cancel.job = job.info->id;
      cancel.flag = true;
      send(std::move(cancel));
    }
  }

  if (round) {
    auto parked = std::move(parked_);
    parked_.clear();
    for (auto& env : parked) {
      auto& job = jobs_[static_cast<std::size_t>(env.job - 1)];
      if (job.done) continue;
      if (env.index == 0) {
        if (job.root_pe < 0) send_root_request(job, 0);
        continue;
      }
      Envelope retry = env;
      retry.hops = 0;
      retry.flag = false;
      retry.dst = static_cast<int>(rng_() % static_cast<std::uint64_t>(cfg_.num_pes() - 1));
      send(std::move(retry));
    }
  }
  for (auto& s : reducer_.on_tick(now_us, net_)) {
    ledger_.merge(*s);
    volumes_ = sched::compute_volumes(ledger_.active_jobs(), budget_);
  }
}

}  // namespace flexsat::runtime
