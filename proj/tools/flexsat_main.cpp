// flexsat: command line front end.
//   flexsat solve <cnf>        mono mode, exit 10 SAT / 20 UNSAT / 0 unknown
//   flexsat run <scenario>     scheduling mode, writes a report
//   flexsat report <trace>     recompute a report from a trace
//   flexsat hos <times.json>   shortest-first baseline
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flexsat/harness/metrics.hpp"
#include "flexsat/harness/report.hpp"
#include "flexsat/harness/scenario_file.hpp"
#include "flexsat/runtime/cluster.hpp"

namespace {

using namespace flexsat;
using nlohmann::json;

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;

struct ClusterFlags {
  int pes = 4;
  int threads = 1;
  double alpha = 7.0 / 8.0;
  int beta = 1500;
  double share_period = 1.0;
  double balance_period = 0.1;
  double halflife = std::numeric_limits<double>::infinity();
  double epsilon = 0;
  std::optional<int> max_jobs;
  std::uint64_t seed = 1;
  bool sim = false;
  bool real = false;
  std::optional<double> timeout;
  std::string out;
  std::string trace;
  bool no_sharing = false;
  std::string demand = "ramp";
};

void add_cluster_flags(CLI::App& app, ClusterFlags& f) {
  app.add_option("--pes", f.pes, "processing elements, including the client")->capture_default_str();
  app.add_option("--threads", f.threads, "solver threads per PE")->capture_default_str();
  app.add_option("--alpha", f.alpha, "clause buffer discount factor")->capture_default_str();
  app.add_option("--beta", f.beta, "clause buffer base size in integers")->capture_default_str();
  app.add_option("--share-period", f.share_period, "clause sharing period in seconds")->capture_default_str();
  app.add_option("--balance-period", f.balance_period, "balancing period in seconds")->capture_default_str();
  app.add_option("--filter-halflife", f.halflife, "clause filter half-life in seconds (inf: never forget)");
  app.add_option("--epsilon", f.epsilon, "fraction of workers kept idle")->capture_default_str();
  app.add_option("--max-jobs", f.max_jobs, "maximum number of concurrently active jobs");
  app.add_option("--seed", f.seed, "random seed")->capture_default_str();
  auto* sim = app.add_flag("--sim", f.sim, "simulated transport and time");
  auto* real = app.add_flag("--real", f.real, "threads and wall-clock time");
  sim->excludes(real);
  app.add_option("--timeout", f.timeout, "wall-clock limit for the whole run in seconds");
  app.add_option("--out", f.out, "report JSON path");
  app.add_option("--trace", f.trace, "write the event trace to this path");
  app.add_flag("--no-sharing", f.no_sharing, "disable clause sharing");
  app.add_option("--demand", f.demand, "demand policy of job roots")->check(CLI::IsMember({"ramp", "full"}));
}

runtime::ClusterConfig make_config(const ClusterFlags& f, runtime::TransportMode fallback) {
  runtime::ClusterConfig cfg;
  cfg.nodes = 1;
  cfg.pes_per_node = f.pes;
  cfg.threads = f.threads;
  cfg.exchange.alpha = f.alpha;
  cfg.exchange.beta = f.beta;
  cfg.exchange.share_period_s = f.share_period;
  cfg.exchange.half_life_s = f.halflife;
  cfg.balance_period_ms = f.balance_period * 1000;
  cfg.epsilon = f.epsilon;
  if (f.max_jobs) cfg.max_active_jobs = *f.max_jobs;
  cfg.seed = f.seed;
  cfg.mode = f.sim ? runtime::TransportMode::Sim : f.real ? runtime::TransportMode::Real : fallback;
  if (f.timeout) cfg.timeout_ms = *f.timeout * 1000;
  cfg.sharing = !f.no_sharing;
  cfg.demand = f.demand == "full" ? runtime::DemandPolicy::Full : runtime::DemandPolicy::Ramp;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit_report(const harness::RunReport& rep, const std::string& out) {
  const auto text = to_json(rep).dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
}

int cmd_solve(const std::string& path, const ClusterFlags& f) {
  auto cfg = make_config(f, runtime::TransportMode::Real);
  cfg.validate();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  auto cnf = std::make_shared<const Cnf>(parse_dimacs(in));
  cfg.trace_deliveries = !f.trace.empty();
  runtime::Trace trace;
  const auto r = runtime::mono_mode(cnf, cfg, trace);
  if (!f.trace.empty()) write_text(f.trace, trace.text());
  if (!f.out.empty()) emit_report(harness::build_report(trace.text()), f.out);

  std::cout << "c variables " << cnf->num_vars() << " clauses " << cnf->clauses().size() << "\n";
  std::cout << "c pes " << cfg.num_pes() << " threads " << cfg.threads << " mode "
            << (cfg.mode == runtime::TransportMode::Sim ? "sim" : "real") << "\n";
  switch (r.verdict) {
    case solver::Verdict::Sat: {
      if (!r.model || !check_model(*cnf, *r.model)) throw std::runtime_error("internal error: model does not verify");
      std::cout << "s SATISFIABLE\n";
      std::string line = "v";
      for (int v = 1; v <= cnf->num_vars(); ++v) {
        const bool value = r.model->get(v).value_or(true);
        const std::string lit = " " + std::to_string(value ? v : -v);
        if (line.size() + lit.size() > 78) {
          std::cout << line << "\n";
          line = "v";
        }
        line += lit;
      }
      std::cout << line << " 0\n";
      return kExitSat;
    }
    case solver::Verdict::Unsat: std::cout << "s UNSATISFIABLE\n"; return kExitUnsat;
    default: std::cout << "s UNKNOWN\n"; return 0;
  }
}

int cmd_run(const std::string& path, ClusterFlags f) {
  const auto sf = harness::load_scenario(path);
  if (!f.max_jobs && sf.max_active_jobs) f.max_jobs = sf.max_active_jobs;
  if (!f.timeout && sf.wallclock_s) f.timeout = sf.wallclock_s;
  auto cfg = make_config(f, runtime::TransportMode::Sim);
  cfg.validate();
  runtime::Trace trace;
  runtime::run_cluster(cfg, sf.scenario, trace);
  const auto text = trace.text();
  if (!f.trace.empty()) write_text(f.trace, text);
  const auto rep = harness::build_report(text);
  emit_report(rep, f.out);
  if (!f.out.empty()) {
    const auto& a = rep.aggregates;
    std::cerr << "jobs " << a.jobs << " solved " << a.solved;
    if (a.par2_ms) std::cerr << " par2_ms " << *a.par2_ms;
    if (a.f) std::cerr << " f " << *a.f;
    std::cerr << "\n";
  }
  return 0;
}

int cmd_report(const std::string& path, const std::string& out) {
  emit_report(harness::build_report(read_text(path)), out);
  return 0;
}

int cmd_hos(const std::string& path, std::optional<double> limit_flag, const std::string& out) {
  const json in = json::parse(read_text(path));
  const json& list = in.is_array() ? in : in.at("times");
  double limit = limit_flag.value_or(in.is_object() ? in.value("limit", 7200.0) : 7200.0);
  std::vector<std::optional<double>> times;
  for (const auto& t : list) times.push_back(t.is_null() ? std::nullopt : std::optional<double>(t.get<double>()));
  const auto h = harness::hos_baseline(times, limit);
  const json result = {{"order", h.order}, {"response", h.response}, {"r_all", h.r_all}, {"r_slv", h.r_slv},
                       {"limit", limit}};
  const auto text = result.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"malleable SAT job scheduler and distributed portfolio solver"};
  app.require_subcommand(1);

  ClusterFlags solve_flags, run_flags;
  std::string cnf_path, scenario_path, trace_path, times_path, report_out, hos_out;
  std::optional<double> hos_limit;

  auto* solve = app.add_subcommand("solve", "solve one formula on the whole cluster (real transport by default)");
  solve->add_option("cnf", cnf_path, "DIMACS file")->required();
  add_cluster_flags(*solve, solve_flags);

  auto* run = app.add_subcommand("run", "process a scenario of jobs (simulated transport by default)");
  run->add_option("scenario", scenario_path, "line-delimited JSON scenario")->required();
  add_cluster_flags(*run, run_flags);

  auto* report = app.add_subcommand("report", "recompute the report of a trace");
  report->add_option("trace", trace_path, "trace file")->required();
  report->add_option("--out", report_out, "report JSON path");

  auto* hos = app.add_subcommand("hos", "shortest-first baseline from known runtimes");
  hos->add_option("times", times_path, "JSON array of runtimes (null: unsolved) or {\"times\":[...],\"limit\":T}")
      ->required();
  hos->add_option("--limit", hos_limit, "response time of unsolved jobs");
  hos->add_option("--out", hos_out, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(cnf_path, solve_flags);
    if (*run) return cmd_run(scenario_path, run_flags);
    if (*report) return cmd_report(trace_path, report_out);
    if (*hos) return cmd_hos(times_path, hos_limit, hos_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
