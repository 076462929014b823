#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "flexsat/formula/cnf.hpp"
#include "flexsat/sched/events.hpp"
#include "flexsat/solver/types.hpp"

namespace flexsat::runtime {

using sched::JobId;

enum class MsgKind : std::uint8_t {
  JobRequest,
  AdoptAck,
  VolumeUpdate,
  EventReduce,
  EventBroadcast,
  ClausesUp,
  ClausesBcast,
  Result,
  JobPayload,
  Abort,
};

std::string_view kind_name(MsgKind k);

/// Immutable job description shipped to adopting PEs.
struct JobInfo {
  JobId id = 0;
  std::string name;
  std::shared_ptr<const Cnf> cnf;
  double priority = 0.5;
  std::int64_t arrival_us = 0;
  int max_volume = 0;            // 0: unbounded
  double synthetic_work_ms = 0;  // > 0: synthetic workload
  std::vector<std::pair<std::int64_t, int>> demand_schedule;  // (offset us, demand)
  int initial_demand = 1;
};

/// A message between PEs. Which fields are meaningful depends on `kind`.
struct Envelope {
  MsgKind kind = MsgKind::JobRequest;
  int src = -1;
  int dst = -1;
  JobId job = 0;
  int index = 0;          // job tree index the message concerns
  std::int64_t epoch = 0;  // balancing round or sharing epoch
  int hops = 0;
  int origin = -1;
  std::uint64_t request_id = 0;
  int value = 0;  // volume, u, or flags depending on kind
  bool flag = false;
  int volume = 0;  // JOB_PAYLOAD to a non-root node: the parent's current volume
  std::vector<std::int32_t> ints;             // clause buffer or model
  std::shared_ptr<const JobInfo> info;        // job payload
  std::shared_ptr<const sched::EventSet> events;
  solver::Verdict verdict = solver::Verdict::Unknown;
  std::uint64_t seq = 0;  // transport sequence number
};

// Flag meanings
inline constexpr bool kAbortReject = false;  // ABORT: adoption refused
inline constexpr bool kAbortJob = true;      // ABORT: job finished, tear down

}  // namespace flexsat::runtime
