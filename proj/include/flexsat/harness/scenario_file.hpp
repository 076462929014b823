#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "flexsat/runtime/config.hpp"

namespace flexsat::harness {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario file: one JSON object per line. Job lines look like
///   {"name":"a","cnf":"a.cnf","arrival":0.5,"priority":0.3,"wallclock_limit":60,
///    "max_volume":8,"synthetic_work":2.0,"demand_schedule":[[0,8],[1.5,3]],"seq_time":12.5}
/// where times are in seconds, "cnf" is relative to the scenario file and
/// "dimacs" may carry the formula inline instead. "seq_time": null marks a
/// sequential timeout. One optional line {"limits":{"J":4,"wallclock":600,"seq_limit":1000}}
/// sets global limits. Arrivals must be nondecreasing.
struct ScenarioFile {
  runtime::Scenario scenario;
  std::optional<int> max_active_jobs;
  std::optional<double> wallclock_s;
  std::optional<double> seq_limit_s;
};

ScenarioFile parse_scenario(std::istream& in, const std::filesystem::path& base_dir);
ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace flexsat::harness
