#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace flexsat::harness {

/// One parsed trace line: `<ms> <pe> <KIND> <job|-> <detail...>`.
struct TraceRecord {
  double ms = 0;
  int pe = 0;
  std::string kind;
  std::optional<std::int64_t> job;
  std::vector<std::string> words;              // detail tokens without '='
  std::map<std::string, std::string> fields;   // key=value tokens; name= takes the rest of the line
};

/// Throws std::invalid_argument on a malformed line.
TraceRecord parse_trace_line(std::string_view line);

struct JobRow {
  std::int64_t id = 0;
  std::string name;
  std::string verdict = "UNKNOWN";  // SAT, UNSAT, UNKNOWN or TIMEOUT
  std::string model = "-";          // ok, bad or -
  bool solved = false;
  double arrival_ms = 0;
  std::optional<double> response_ms;
  std::optional<double> latency_ms;  // introduction to payload transfer to the root
  double limit_ms = 0;               // may be infinite
  std::optional<double> seq_ms;
  int max_volume = 0;
  int starts = 0;
  int resumes = 0;
};

struct Aggregates {
  std::size_t jobs = 0;
  std::size_t solved = 0;
  std::optional<double> par2_ms;
  std::optional<double> r_all_ms;
  std::optional<double> r_slv_ms;
  std::optional<double> s_med, s_tot, s_med_hard, s_tot_hard;
  std::optional<double> f;
  std::optional<double> latency_median_ms, latency_max_ms;
  std::optional<double> busy_full_ratio;  // share of post-saturation samples with busy == budget
};

struct RunReport {
  nlohmann::json config;  // key=value pairs of the CONFIG line
  int budget = 0;
  int cores = 0;          // worker PEs times threads
  std::vector<JobRow> jobs;
  std::vector<double> sample_ms;
  std::vector<int> busy;
  std::vector<int> active;
  double end_ms = 0;
  std::uint64_t messages = 0;
  Aggregates aggregates;
};

RunReport build_report(std::string_view trace_text);
Aggregates compute_aggregates(const RunReport& report);

nlohmann::json to_json(const RunReport& report);

}  // namespace flexsat::harness
