#include "flexsat/runtime/transport.hpp"

#include <algorithm>
#include <string>

namespace flexsat::runtime {

std::string_view kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::JobRequest: return "JOB_REQUEST";
    case MsgKind::AdoptAck: return "ADOPT_ACK";
    case MsgKind::VolumeUpdate: return "VOLUME_UPDATE";
    case MsgKind::EventReduce: return "EVENT_REDUCE";
    case MsgKind::EventBroadcast: return "EVENT_BROADCAST";
    case MsgKind::ClausesUp: return "CLAUSES_UP";
    case MsgKind::ClausesBcast: return "CLAUSES_BCAST";
    case MsgKind::Result: return "RESULT";
    case MsgKind::JobPayload: return "JOB_PAYLOAD";
    case MsgKind::Abort: return "ABORT";
  }
  return "?";
}

namespace {

void check_dst(const Envelope& env, int n) {
  if (env.dst < 0 || env.dst >= n) throw TransportError("no such PE: " + std::to_string(env.dst));
}

}  // namespace

SimTransport::SimTransport(int num_pes, LatencyModel latency, std::uint64_t seed)
    : num_pes_(num_pes), latency_(latency), rng_(seed) {}

void SimTransport::send(Envelope env) {
  check_dst(env, num_pes_);
  std::int64_t t = now_us_ + latency_.base_us;
  if (latency_.jitter_us > 0) t += static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(latency_.jitter_us + 1));
  // per-pair FIFO: never overtake an earlier message of the same pair
  auto& last = last_delivery_[{env.src, env.dst}];
  t = std::max(t, last);
  last = t;
  env.seq = ++seq_;
  queue_.push(Item{t, env.seq, std::move(env)});
}

std::optional<std::int64_t> SimTransport::next_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().time;
}

std::optional<std::pair<std::int64_t, Envelope>> SimTransport::pop_due(std::int64_t until_us) {
  if (queue_.empty() || queue_.top().time > until_us) return std::nullopt;
  auto item = queue_.top();
  queue_.pop();
  return std::make_pair(item.time, std::move(item.env));
}

std::optional<std::pair<std::int64_t, Envelope>> SimTransport::poll(int dst) {
  std::vector<Item> skipped;
  std::optional<std::pair<std::int64_t, Envelope>> found;
  while (!queue_.empty()) {
    auto item = queue_.top();
    queue_.pop();
    if (item.env.dst == dst) {
      found = std::make_pair(item.time, std::move(item.env));
      break;
    }
    skipped.push_back(std::move(item));
  }
  for (auto& s : skipped) queue_.push(std::move(s));
  return found;
}

ThreadTransport::ThreadTransport(int num_pes) {
  for (int i = 0; i < num_pes; ++i) queues_.push_back(std::make_unique<Queue>());
}

void ThreadTransport::send(Envelope env) {
  check_dst(env, num_pes());
  {
    std::lock_guard lock(seq_mutex_);
    env.seq = ++seq_;
  }
  auto& q = *queues_[static_cast<std::size_t>(env.dst)];
  {
    std::lock_guard lock(q.mutex);
    q.items.push_back(std::move(env));
  }
  q.cv.notify_one();
}

std::optional<Envelope> ThreadTransport::receive(int pe, std::chrono::microseconds timeout) {
  auto& q = *queues_.at(static_cast<std::size_t>(pe));
  std::unique_lock lock(q.mutex);
  if (!q.cv.wait_for(lock, timeout, [&] { return !q.items.empty(); })) return std::nullopt;
  auto env = std::move(q.items.front());
  q.items.pop_front();
  return env;
}

std::optional<Envelope> ThreadTransport::try_receive(int pe) {
  auto& q = *queues_.at(static_cast<std::size_t>(pe));
  std::lock_guard lock(q.mutex);
  if (q.items.empty()) return std::nullopt;
  auto env = std::move(q.items.front());
  q.items.pop_front();
  return env;
}

std::uint64_t ThreadTransport::sent() const {
  std::lock_guard lock(seq_mutex_);
  return seq_;
}

}  // namespace flexsat::runtime
