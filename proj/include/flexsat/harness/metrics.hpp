#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace flexsat::harness {

struct RunTime {
  bool solved = false;
  double time = 0;  // ignored when unsolved
};

/// Mean runtime with every unsolved instance counted as 2 * limit.
/// Throws std::invalid_argument for a solved time above the limit.
double par2(std::span<const RunTime> runs, double limit);

struct Speedups {
  std::optional<double> median;  // absent when the parallel side solved nothing
  std::optional<double> total;
  std::size_t instances = 0;     // instances the ratios were taken over
};

/// Per-instance speedups over instances the parallel approach solved.
/// Sequential timeouts are generously attributed seq_limit. When
/// hard_threshold is given, only instances whose (attributed) sequential
/// time is at least that value count.
Speedups speedups(std::span<const RunTime> seq, double seq_limit, std::span<const RunTime> par,
                  std::optional<double> hard_threshold = std::nullopt);

struct HosSchedule {
  std::vector<std::size_t> order;  // solved jobs, shortest first, ties by input position
  std::vector<double> response;    // per input job
  double r_all = 0;                // mean response over all jobs
  double r_slv = 0;                // mean response over solved jobs (0 if none)
};

/// Hypothetical optimal scheduler: with known runtimes the whole machine
/// runs one job at a time, shortest first. Unsolved jobs (nullopt) are not
/// scheduled and get response time `limit`.
HosSchedule hos_baseline(std::span<const std::optional<double>> times, double limit);

/// Total job node starts divided by the sum of per-job maximum volumes.
double over_transfer(std::size_t starts, std::size_t sum_max_volume);

double median(std::vector<double> values);

}  // namespace flexsat::harness
