#include "flexsat/harness/scenario_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flexsat/formula/cnf.hpp"

namespace flexsat::harness {

namespace {

using nlohmann::json;

double seconds_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ScenarioError(std::string(key) + " must be a number");
  const double s = v.get<double>();
  if (!(s >= 0)) throw ScenarioError(std::string(key) + " must be nonnegative");
  return s;
}

}  // namespace

ScenarioFile parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  ScenarioFile out;
  std::map<std::filesystem::path, std::shared_ptr<const Cnf>> formulas;
  std::vector<std::optional<double>> seq_times;
  std::vector<bool> seq_given;
  std::string line;
  int line_no = 0;
  double last_arrival = 0;
  bool limits_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw ScenarioError("expected a JSON object");
      if (j.contains("limits")) {
        if (limits_seen) throw ScenarioError("more than one limits line");
        limits_seen = true;
        const auto& l = j.at("limits");
        if (l.contains("J")) {
          const int J = l.at("J").get<int>();
          if (J < 1) throw ScenarioError("J must be positive");
          out.max_active_jobs = J;
        }
        if (l.contains("wallclock")) out.wallclock_s = seconds_field(l, "wallclock");
        if (l.contains("seq_limit")) out.seq_limit_s = seconds_field(l, "seq_limit");
        continue;
      }

      runtime::JobSpec spec;
      spec.name = j.value("name", std::string("job") + std::to_string(out.scenario.jobs.size() + 1));
      if (j.contains("dimacs")) {
        spec.cnf = std::make_shared<const Cnf>(parse_dimacs(j.at("dimacs").get<std::string>()));
      } else if (j.contains("cnf")) {
        const auto path = base_dir / j.at("cnf").get<std::string>();
        auto& slot = formulas[path];
        if (!slot) {
          std::ifstream f(path);
          if (!f) throw ScenarioError("cannot read " + path.string());
          slot = std::make_shared<const Cnf>(parse_dimacs(f));
        }
        spec.cnf = slot;
      } else {
        throw ScenarioError("job without \"cnf\" or \"dimacs\"");
      }
      if (j.contains("name") && spec.name.empty()) throw ScenarioError("empty name");
      spec.arrival_ms = j.contains("arrival") ? seconds_field(j, "arrival") * 1000 : 0;
      if (spec.arrival_ms < last_arrival) throw ScenarioError("arrival times must be nondecreasing");
      last_arrival = spec.arrival_ms;
      spec.priority = j.value("priority", 0.5);
      if (!(spec.priority > 0 && spec.priority < 1)) throw ScenarioError("priority out of (0,1)");
      if (j.contains("wallclock_limit")) spec.wallclock_limit_ms = seconds_field(j, "wallclock_limit") * 1000;
      if (j.contains("max_volume")) {
        spec.max_volume = j.at("max_volume").get<int>();
        if (spec.max_volume < 1) throw ScenarioError("max_volume must be positive");
      }
      if (j.contains("synthetic_work")) spec.synthetic_work_ms = seconds_field(j, "synthetic_work") * 1000;
      if (j.contains("demand_schedule")) {
        for (const auto& step : j.at("demand_schedule")) {
          if (!step.is_array() || step.size() != 2) throw ScenarioError("demand_schedule entries are [time, demand]");
          const double t = step[0].get<double>();
          const int d = step[1].get<int>();
          if (t < 0 || d < 1) throw ScenarioError("demand_schedule needs time >= 0 and demand >= 1");
          if (!spec.demand_schedule.empty() && t * 1000 < spec.demand_schedule.back().first)
            throw ScenarioError("demand_schedule times must be nondecreasing");
          spec.demand_schedule.emplace_back(t * 1000, d);
        }
      }
      seq_given.push_back(j.contains("seq_time"));
      if (j.contains("seq_time") && !j.at("seq_time").is_null())
        seq_times.push_back(seconds_field(j, "seq_time"));
      else
        seq_times.push_back(std::nullopt);
      out.scenario.jobs.push_back(std::move(spec));
    } catch (const ScenarioError& e) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  // sequential timeouts are attributed the sequential limit
  for (std::size_t i = 0; i < seq_times.size(); ++i) {
    if (!seq_given[i]) continue;
    if (seq_times[i]) {
      out.scenario.jobs[i].reference_ms = *seq_times[i] * 1000;
    } else {
      if (!out.seq_limit_s) throw ScenarioError("seq_time null needs limits.seq_limit");
      out.scenario.jobs[i].reference_ms = *out.seq_limit_s * 1000;
    }
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read " + path.string());
  return parse_scenario(in, path.parent_path());
}

}  // namespace flexsat::harness
