#include "flexsat/runtime/cluster.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "flexsat/exchange/clause_hash.hpp"
#include "flexsat/sched/volumes.hpp"

namespace flexsat::runtime {

int ClusterConfig::budget() const { return sched::volume_budget(num_pes(), epsilon, 1); }

void ClusterConfig::validate() const {
  if (nodes < 1 || pes_per_node < 1) throw std::invalid_argument("node and PE counts must be positive");
  if (num_pes() < 2) throw std::invalid_argument("need at least 2 PEs (one worker and the client)");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
  if (!(epsilon >= 0 && epsilon < 1)) throw std::invalid_argument("epsilon out of [0,1)");
  if (!(balance_period_ms > 0)) throw std::invalid_argument("balance period must be positive");
  if (max_active_jobs < 1) throw std::invalid_argument("max active jobs must be positive");
  if (cache_capacity < 1) throw std::invalid_argument("cache capacity must be positive");
  if (!(sim_props_per_ms > 0)) throw std::invalid_argument("simulated speed must be positive");
  if (!(timeout_ms > 0)) throw std::invalid_argument("timeout must be positive");
  if (exchange.filter_bits_log2 < 6 || exchange.filter_bits_log2 > 32)
    throw std::invalid_argument("filter size out of [6,32] bits");
  exchange.validate();
}

namespace {

void log_config(const ClusterConfig& cfg, const Scenario& scenario, Trace& trace) {
  trace.log(0, cfg.client_pe(), "CONFIG", -1,
            fmt::format("pes={} threads={} epsilon={} budget={} e_ms={} share_s={} alpha={} beta={} halflife={} "
                        "sharing={} J={} seed={} mode={} jobs={}",
                        cfg.num_pes(), cfg.threads, cfg.epsilon, cfg.budget(), cfg.balance_period_ms,
                        cfg.exchange.share_period_s, cfg.exchange.alpha, cfg.exchange.beta, cfg.exchange.half_life_s,
                        cfg.sharing ? 1 : 0, cfg.max_active_jobs, cfg.seed,
                        cfg.mode == TransportMode::Sim ? "sim" : "real", scenario.jobs.size()));
}

std::vector<int> worker_ids(const ClusterConfig& cfg) {
  std::vector<int> ids(static_cast<std::size_t>(cfg.num_pes() - 1));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

ClusterOutcome run_sim(const ClusterConfig& cfg, const Scenario& scenario, Trace& trace) {
  SimTransport net(cfg.num_pes(), cfg.latency, exchange::mix64(cfg.seed ^ 0x7a11ULL));
  const sched::PeGraph graph(worker_ids(cfg), cfg.graph_degree, exchange::mix64(cfg.seed ^ 0x6a4fULL));
  std::vector<std::unique_ptr<Worker>> workers;
  for (int i = 0; i < cfg.num_pes() - 1; ++i) workers.push_back(std::make_unique<Worker>(i, cfg, graph, net, trace));
  Client client(cfg.client_pe(), cfg, scenario, net, trace);

  const std::int64_t tick = 1000;
  const auto sample_period = static_cast<std::int64_t>(std::llround(cfg.sample_period_ms * 1000));
  std::int64_t next_sample = sample_period / 2;
  const double limit_us = cfg.timeout_ms * 1000.0;
  ClusterOutcome out;
  std::int64_t now = 0;
  for (std::int64_t next_tick = 0;; next_tick += tick) {
    while (auto item = net.pop_due(next_tick - 1)) {
      now = item->first;
      net.set_now(now);
      const auto& env = item->second;
      if (env.dst == cfg.client_pe())
        client.on_message(env, now);
      else
        workers[static_cast<std::size_t>(env.dst)]->on_message(env, now);
    }
    now = next_tick;
    net.set_now(now);
    if (static_cast<double>(now) >= limit_us) {
      out.timed_out = !client.finished();
      client.expire_all(now);
      break;
    }
    if (sample_period > 0 && now >= next_sample) {
      int busy = 0;
      for (const auto& w : workers) busy += w->busy() ? 1 : 0;
      trace.log(now, cfg.client_pe(), "SAMPLE", -1, fmt::format("busy={} active={}", busy, client.active_jobs()));
      next_sample += sample_period;
    }
    client.on_tick(now);
    if (client.finished()) break;
    for (auto& w : workers) w->on_tick(now);
  }
  out.jobs = client.outcomes();
  out.end_us = now;
  out.messages = net.sent();
  trace.log(now, cfg.client_pe(), "END", -1, fmt::format("messages={}", out.messages));
  return out;
}

ClusterOutcome run_real(const ClusterConfig& cfg, const Scenario& scenario, Trace& trace) {
  ThreadTransport net(cfg.num_pes());
  const sched::PeGraph graph(worker_ids(cfg), cfg.graph_degree, exchange::mix64(cfg.seed ^ 0x6a4fULL));
  std::vector<std::unique_ptr<Worker>> workers;
  for (int i = 0; i < cfg.num_pes() - 1; ++i) workers.push_back(std::make_unique<Worker>(i, cfg, graph, net, trace));
  Client client(cfg.client_pe(), cfg, scenario, net, trace);

  const auto start = std::chrono::steady_clock::now();
  auto now_us = [&] {
    return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
  };
  std::atomic<bool> stop{false};
  auto pe_loop = [&](int id, auto& actor) {
    std::int64_t next_tick = 0;
    while (!stop.load(std::memory_order_acquire)) {
      const auto wait = std::max<std::int64_t>(0, next_tick - now_us());
      if (auto env = net.receive(id, std::chrono::microseconds(wait))) actor.on_message(*env, now_us());
      const auto t = now_us();
      if (t >= next_tick) {
        actor.on_tick(t);
        next_tick = t - t % 1000 + 1000;
      }
    }
  };
  std::vector<std::thread> threads;
  for (auto& w : workers) threads.emplace_back([&, wp = w.get()] { pe_loop(wp->id(), *wp); });

  ClusterOutcome out;
  const auto sample_period = static_cast<std::int64_t>(std::llround(cfg.sample_period_ms * 1000));
  std::int64_t next_tick = 0, next_sample = sample_period / 2;
  for (;;) {
    const auto wait = std::max<std::int64_t>(0, next_tick - now_us());
    if (auto env = net.receive(cfg.client_pe(), std::chrono::microseconds(wait))) client.on_message(*env, now_us());
    const auto t = now_us();
    if (static_cast<double>(t) >= cfg.timeout_ms * 1000.0) {
      out.timed_out = !client.finished();
      client.expire_all(t);
      break;
    }
    if (t >= next_tick) {
      if (sample_period > 0 && t >= next_sample) {
        int busy = 0;
        for (const auto& w : workers) busy += w->busy() ? 1 : 0;
        trace.log(t, cfg.client_pe(), "SAMPLE", -1, fmt::format("busy={} active={}", busy, client.active_jobs()));
        next_sample += sample_period;
      }
      client.on_tick(t);
      next_tick = t - t % 1000 + 1000;
    }
    if (client.finished()) break;
  }
  stop.store(true, std::memory_order_release);
  for (auto& th : threads) th.join();
  workers.clear();  // joins solver threads
  out.jobs = client.outcomes();
  out.end_us = now_us();
  out.messages = net.sent();
  trace.log(out.end_us, cfg.client_pe(), "END", -1, fmt::format("messages={}", out.messages));
  return out;
}

}  // namespace

ClusterOutcome run_cluster(const ClusterConfig& cfg, const Scenario& scenario, Trace& trace) {
  cfg.validate();
  for (const auto& j : scenario.jobs) {
    if (!j.cnf) throw std::invalid_argument("job without formula");
    if (!(j.priority > 0 && j.priority < 1)) throw std::invalid_argument("priority out of (0,1)");
  }
  log_config(cfg, scenario, trace);
  return cfg.mode == TransportMode::Sim ? run_sim(cfg, scenario, trace) : run_real(cfg, scenario, trace);
}

ClusterConfig mono_config(ClusterConfig cfg) {
  cfg.demand = DemandPolicy::Full;
  cfg.epsilon = 0;
  cfg.max_active_jobs = 1;
  return cfg;
}

solver::SolveResult mono_mode(std::shared_ptr<const Cnf> cnf, const ClusterConfig& cfg_in, Trace& trace) {
  const auto cfg = mono_config(cfg_in);
  Scenario sc;
  JobSpec spec;
  spec.name = "mono";
  spec.cnf = std::move(cnf);
  sc.jobs.push_back(spec);
  auto out = run_cluster(cfg, sc, trace);
  solver::SolveResult r;
  r.verdict = out.jobs.front().verdict;
  r.model = out.jobs.front().model;
  return r;
}

}  // namespace flexsat::runtime
