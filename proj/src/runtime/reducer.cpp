#include "flexsat/runtime/pe.hpp"

namespace flexsat::runtime {

EventReducer::EventReducer(int self, int num_pes, std::int64_t period_us)
    : self_(self), num_pes_(num_pes), period_us_(std::max<std::int64_t>(period_us, 1)) {}

int EventReducer::children() const {
  int n = 0;
  for (int c : {2 * self_ + 1, 2 * self_ + 2}) n += c < num_pes_ ? 1 : 0;
  return n;
}

std::vector<std::shared_ptr<const sched::EventSet>> EventReducer::on_tick(std::int64_t now_us, Transport& net) {
  std::vector<std::shared_ptr<const sched::EventSet>> out;
  while ((round_ + 1) * period_us_ <= now_us) {
    ++round_;
    auto& r = rounds_[round_];
    r.events.merge(pending_);
    pending_.clear();
    r.own = true;
    for (auto& s : try_close(round_, net)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::shared_ptr<const sched::EventSet>> EventReducer::on_reduce(const Envelope& env, Transport& net) {
  auto& r = rounds_[env.epoch];
  if (env.events) r.events.merge(*env.events);
  ++r.arrived;
  return try_close(env.epoch, net);
}

std::vector<std::shared_ptr<const sched::EventSet>> EventReducer::try_close(std::int64_t round, Transport& net) {
  auto it = rounds_.find(round);
  if (it == rounds_.end() || !it->second.own || it->second.arrived < children()) return {};
  auto events = std::make_shared<const sched::EventSet>(std::move(it->second.events));
  rounds_.erase(it);
  if (self_ != 0) {
    Envelope env;
    env.kind = MsgKind::EventReduce;
    env.src = self_;
    env.dst = (self_ - 1) / 2;
    env.epoch = round;
    env.events = std::move(events);
    net.send(std::move(env));
    return {};
  }
  if (events->empty()) return {};
  Envelope env;
  env.kind = MsgKind::EventBroadcast;
  env.src = self_;
  env.epoch = round;
  env.events = events;
  forward_broadcast(env, net);
  return {events};
}

void EventReducer::forward_broadcast(const Envelope& env, Transport& net) const {
  for (int c : {2 * self_ + 1, 2 * self_ + 2}) {
    if (c >= num_pes_) continue;
    Envelope out = env;
    out.src = self_;
    out.dst = c;
    net.send(std::move(out));
  }
}

}  // namespace flexsat::runtime
