#include "flexsat/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flexsat/harness/metrics.hpp"

namespace flexsat::harness {

namespace {

double to_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number " + s);
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad integer " + s);
  return v;
}

}  // namespace

TraceRecord parse_trace_line(std::string_view line) {
  TraceRecord r;
  std::istringstream in{std::string(line)};
  std::string time, pe, job;
  if (!(in >> time >> pe >> r.kind >> job)) throw std::invalid_argument("short trace line: " + std::string(line));
  r.ms = to_double(time);
  r.pe = to_int(pe);
  if (job != "-") r.job = std::stoll(job);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      r.words.push_back(tok);
      continue;
    }
    auto key = tok.substr(0, eq);
    auto value = tok.substr(eq + 1);
    if (key == "name") {
      std::string rest;
      std::getline(in, rest);
      value += rest;
    }
    r.fields[std::move(key)] = std::move(value);
  }
  return r;
}

RunReport build_report(std::string_view trace_text) {
  RunReport rep;
  std::map<std::int64_t, JobRow> rows;
  auto row = [&](std::int64_t id) -> JobRow& {
    auto& r = rows[id];
    r.id = id;
    return r;
  };
  std::size_t start = 0;
  while (start < trace_text.size()) {
    auto end = trace_text.find('\n', start);
    if (end == std::string_view::npos) end = trace_text.size();
    const auto line = trace_text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    const auto r = parse_trace_line(line);
    const auto& k = r.kind;
    if (k == "CONFIG") {
      for (const auto& [key, v] : r.fields) {
        try {
          rep.config[key] = to_double(v);
        } catch (const std::exception&) {
          rep.config[key] = v;
        }
      }
      rep.budget = to_int(r.fields.at("budget"));
      rep.cores = (to_int(r.fields.at("pes")) - 1) * to_int(r.fields.at("threads"));
    } else if (k == "ARRIVE") {
      auto& j = row(*r.job);
      j.arrival_ms = r.ms;
      j.limit_ms = to_double(r.fields.at("limit"));
      if (r.fields.at("seq") != "-") j.seq_ms = to_double(r.fields.at("seq"));
    } else if (k == "INTRO") {
      auto& j = row(*r.job);
      const auto it = r.fields.find("name");
      if (it != r.fields.end() && it->second != "-") j.name = it->second;
    } else if (k == "SCHEDULED") {
      row(*r.job).latency_ms = to_double(r.fields.at("latency"));
    } else if (k == "VOLUME") {
      auto& j = row(*r.job);
      j.max_volume = std::max(j.max_volume, to_int(r.fields.at("v")));
    } else if (k == "START") {
      auto& j = row(*r.job);
      ++j.starts;
      j.max_volume = std::max(j.max_volume, 1);
    } else if (k == "RESUME") {
      ++row(*r.job).resumes;
    } else if (k == "DONE") {
      auto& j = row(*r.job);
      j.verdict = r.words.at(0);
      j.solved = j.verdict == "SAT" || j.verdict == "UNSAT";
      j.response_ms = to_double(r.fields.at("resp"));
      j.model = r.fields.at("model");
    } else if (k == "SAMPLE") {
      rep.sample_ms.push_back(r.ms);
      rep.busy.push_back(to_int(r.fields.at("busy")));
      rep.active.push_back(to_int(r.fields.at("active")));
    } else if (k == "END") {
      rep.end_ms = r.ms;
      rep.messages = std::stoull(r.fields.at("messages"));
    }
  }
  for (auto& [id, j] : rows) rep.jobs.push_back(std::move(j));
  rep.aggregates = compute_aggregates(rep);
  return rep;
}

Aggregates compute_aggregates(const RunReport& rep) {
  Aggregates a;
  a.jobs = rep.jobs.size();
  if (rep.jobs.empty()) return a;

  // A timed-out job counts with its limit, or with its observed response when it had none.
  std::vector<double> all, solved, latencies, penalized;
  std::vector<RunTime> seq, par;
  std::size_t starts = 0, volume_sum = 0;
  for (const auto& j : rep.jobs) {
    if (j.solved) ++a.solved;
    const double observed = j.response_ms.value_or(rep.end_ms - j.arrival_ms);
    const double cap = std::isfinite(j.limit_ms) ? j.limit_ms : observed;
    all.push_back(j.solved ? observed : cap);
    penalized.push_back(j.solved ? observed : 2 * cap);
    if (j.solved) solved.push_back(observed);
    if (j.latency_ms) latencies.push_back(*j.latency_ms);
    starts += static_cast<std::size_t>(j.starts);
    volume_sum += static_cast<std::size_t>(j.max_volume);
    if (j.seq_ms) {
      seq.push_back({true, *j.seq_ms});
      par.push_back({j.solved, observed});
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  a.par2_ms = mean(penalized);
  a.r_all_ms = mean(all);
  if (!solved.empty()) a.r_slv_ms = mean(solved);
  if (!latencies.empty()) {
    a.latency_median_ms = median(latencies);
    a.latency_max_ms = *std::max_element(latencies.begin(), latencies.end());
  }
  if (volume_sum > 0) a.f = over_transfer(starts, volume_sum);
  if (!seq.empty()) {
    // reference times are already capped, so the sequential limit is never used here
    const auto s = speedups(seq, 0, par);
    a.s_med = s.median;
    a.s_tot = s.total;
    const auto h = speedups(seq, 0, par, rep.cores * 1000.0);
    a.s_med_hard = h.median;
    a.s_tot_hard = h.total;
  }

  // Post-saturation window: from the first sample at full budget up to the
  // last sample where every admitted slot was still backed by queued work,
  // i.e. before the active job count first drops for good.
  if (rep.budget > 0) {
    std::size_t first = rep.busy.size();
    for (std::size_t i = 0; i < rep.busy.size(); ++i)
      if (rep.busy[i] == rep.budget) {
        first = i;
        break;
      }
    if (first < rep.busy.size()) {
      const int peak = *std::max_element(rep.active.begin(), rep.active.end());
      std::size_t last = first;
      for (std::size_t i = first; i < rep.active.size(); ++i)
        if (rep.active[i] == peak) last = i;
      std::size_t full = 0;
      for (std::size_t i = first; i <= last; ++i) full += rep.busy[i] == rep.budget ? 1 : 0;
      a.busy_full_ratio = static_cast<double>(full) / static_cast<double>(last - first + 1);
    }
  }
  return a;
}

nlohmann::json to_json(const RunReport& rep) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto lim = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
  json out;
  out["config"] = rep.config;
  out["budget"] = rep.budget;
  out["cores"] = rep.cores;
  out["end_ms"] = rep.end_ms;
  out["messages"] = rep.messages;
  json jobs = json::array();
  for (const auto& j : rep.jobs)
    jobs.push_back({{"id", j.id},
                    {"name", j.name},
                    {"verdict", j.verdict},
                    {"model", j.model},
                    {"arrival_ms", j.arrival_ms},
                    {"response_ms", opt(j.response_ms)},
                    {"latency_ms", opt(j.latency_ms)},
                    {"limit_ms", lim(j.limit_ms)},
                    {"seq_ms", opt(j.seq_ms)},
                    {"max_volume", j.max_volume},
                    {"starts", j.starts},
                    {"resumes", j.resumes}});
  out["jobs"] = std::move(jobs);
  out["series"] = {{"t_ms", rep.sample_ms}, {"busy", rep.busy}, {"active", rep.active}};
  const auto& a = rep.aggregates;
  out["aggregates"] = {{"jobs", a.jobs},
                       {"solved", a.solved},
                       {"par2_ms", opt(a.par2_ms)},
                       {"r_all_ms", opt(a.r_all_ms)},
                       {"r_slv_ms", opt(a.r_slv_ms)},
                       {"s_med", opt(a.s_med)},
                       {"s_tot", opt(a.s_tot)},
                       {"s_med_hard", opt(a.s_med_hard)},
                       {"s_tot_hard", opt(a.s_tot_hard)},
                       {"f", opt(a.f)},
                       {"latency_median_ms", opt(a.latency_median_ms)},
                       {"latency_max_ms", opt(a.latency_max_ms)},
                       {"busy_full_ratio", opt(a.busy_full_ratio)}};
  return out;
}

}  // namespace flexsat::harness
