#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "flexsat/runtime/envelope.hpp"

namespace flexsat::runtime {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reliable message passing with per-(src, dst) FIFO order.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual int num_pes() const = 0;
  /// Throws TransportError for a nonexistent destination.
  virtual void send(Envelope env) = 0;
};

struct LatencyModel {
  std::int64_t base_us = 100;
  std::int64_t jitter_us = 20;  // uniform in [0, jitter_us]
};

/// Discrete-event transport: messages are delivered at send time plus a
/// seeded latency, in (time, sequence) order. Never delivers two messages
/// of the same pair out of order.
class SimTransport final : public Transport {
 public:
  SimTransport(int num_pes, LatencyModel latency, std::uint64_t seed);

  int num_pes() const override { return num_pes_; }
  void set_now(std::int64_t now_us) { now_us_ = now_us; }
  std::int64_t now() const { return now_us_; }
  void send(Envelope env) override;

  bool empty() const { return queue_.empty(); }
  std::optional<std::int64_t> next_time() const;
  /// Removes the next message due at or before `until_us`.
  std::optional<std::pair<std::int64_t, Envelope>> pop_due(std::int64_t until_us);
  /// Next message for `dst`, regardless of time (testing aid).
  std::optional<std::pair<std::int64_t, Envelope>> poll(int dst);

  std::uint64_t sent() const { return seq_; }

 private:
  struct Item {
    std::int64_t time;
    std::uint64_t seq;
    Envelope env;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  int num_pes_;
  LatencyModel latency_;
  std::mt19937_64 rng_;
  std::int64_t now_us_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  std::map<std::pair<int, int>, std::int64_t> last_delivery_;
};

/// One blocking queue per PE; for real concurrent execution.
class ThreadTransport final : public Transport {
 public:
  explicit ThreadTransport(int num_pes);

  int num_pes() const override { return static_cast<int>(queues_.size()); }
  void send(Envelope env) override;

  /// Waits up to `timeout` for a message to `pe`.
  std::optional<Envelope> receive(int pe, std::chrono::microseconds timeout);
  std::optional<Envelope> try_receive(int pe);

  std::uint64_t sent() const;

 private:
  struct Queue {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Envelope> items;
  };
  std::vector<std::unique_ptr<Queue>> queues_;
  mutable std::mutex seq_mutex_;
  std::uint64_t seq_ = 0;
};

}  // namespace flexsat::runtime
