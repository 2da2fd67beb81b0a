// swarmcap: run seeded sweeps and summarize their CSV output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swarmcap/experiment.hpp"

using namespace swarmcap;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::string> policy;
  std::optional<double> beta;
  std::optional<double> f;
  std::optional<int> uavs;
  std::optional<double> speed;
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed_base;
  std::optional<std::string> out;
  bool timeseries{false};
  std::optional<unsigned> jobs;
  bool quiet{false};
};

// Flags narrow the corresponding sweep axis to a single value.
ExperimentSpec build_spec(const RunFlags& fl) {
  ExperimentSpec spec = fl.config.empty() ? ExperimentSpec{} : parse_config(fl.config);
  if (fl.policy) {
    spec.base.policy.kind = parse_policy_kind(*fl.policy);
    spec.policies = {spec.base.policy.kind};
  }
  if (fl.beta) {
    spec.base.policy.beta = *fl.beta;
    spec.beta_values = {*fl.beta};
  }
  if (fl.f) {
    spec.base.policy.f = *fl.f;
    spec.f_values = {*fl.f};
  }
  if (fl.uavs) {
    spec.base.n_uavs = *fl.uavs;
    spec.n_uavs_values = {*fl.uavs};
  }
  if (fl.speed) {
    spec.base.speed_mps = *fl.speed;
    spec.speed_values = {*fl.speed};
  }
  if (fl.seeds) spec.runs_per_point = *fl.seeds;
  if (fl.seed_base) spec.seed_base = *fl.seed_base;
  if (fl.out) spec.output_dir = *fl.out;
  if (fl.jobs) spec.jobs = *fl.jobs;
  spec.timeseries = spec.timeseries || fl.timeseries;
  spec.validate();
  return spec;
}

void add_run_options(CLI::App* cmd, RunFlags& fl) {
  cmd->add_option("--config", fl.config, "JSON experiment file")->envname("SWARMCAP_CONFIG");
  cmd->add_option("--policy", fl.policy, "cap | pheromone | cacoc2")->envname("SWARMCAP_POLICY");
  auto* beta = cmd->add_option("--beta", fl.beta, "CAP connectivity threshold")
                   ->envname("SWARMCAP_BETA");
  auto* f = cmd->add_option("--f", fl.f, "CACOC2 flocking weight")->envname("SWARMCAP_F");
  beta->excludes(f);
  cmd->add_option("--uavs", fl.uavs, "number of UAVs")->envname("SWARMCAP_UAVS");
  cmd->add_option("--speed", fl.speed, "cruise speed [m/s]")->envname("SWARMCAP_SPEED");
  cmd->add_option("--seeds", fl.seeds, "runs per sweep point")->envname("SWARMCAP_SEEDS");
  cmd->add_option("--seed-base", fl.seed_base, "first seed")->envname("SWARMCAP_SEED_BASE");
  cmd->add_option("--out", fl.out, "output directory")->envname("SWARMCAP_OUT");
  cmd->add_flag("--timeseries", fl.timeseries, "also write per-run metric samples")
      ->envname("SWARMCAP_TIMESERIES");
  cmd->add_option("--jobs", fl.jobs, "worker threads (0 = all cores)")->envname("SWARMCAP_JOBS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV swarm coverage/connectivity simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run a sweep and write runs.csv and summary.csv");
  add_run_options(run_cmd, run_flags);
  run_cmd->add_flag("--quiet", run_flags.quiet, "no per-run progress");

  std::string summary_in;
  auto* sum_cmd = app.add_subcommand("summarize", "print a results table sorted by Tc");
  sum_cmd->add_option("--in", summary_in, "summary.csv or runs.csv")
      ->required()
      ->envname("SWARMCAP_IN");

  RunFlags trace_flags;
  std::string trace_out, messages_out;
  auto* trace_cmd =
      app.add_subcommand("trace", "run the first sweep point once and dump per-tick positions");
  add_run_options(trace_cmd, trace_flags);
  trace_cmd->add_option("--trace-out", trace_out, "trajectory CSV")->required();
  trace_cmd->add_option("--messages-out", messages_out, "hello log CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto spec = build_spec(run_flags);
      const auto total = expand(spec).size() * static_cast<std::size_t>(spec.runs_per_point);
      std::size_t done = 0;
      const auto report = execute(spec, [&](const RunRecord& r) {
        ++done;
        if (run_flags.quiet) return;
        std::fprintf(stderr, "[%zu/%zu] %s seed %llu: %s\n", done, total,
                     std::string(to_string(r.config.policy.kind)).c_str(),
                     static_cast<unsigned long long>(r.config.seed),
                     r.result ? "ok" : r.error.c_str());
      });
      std::cout << summarize(std::filesystem::path(spec.output_dir) / "summary.csv");
      if (report.failed)
        std::fprintf(stderr, "%zu of %zu runs failed\n", report.failed, report.runs);
      return report.exit_status();
    }
    if (*sum_cmd) {
      std::cout << summarize(summary_in);
      return 0;
    }
    if (*trace_cmd) {
      const auto spec = build_spec(trace_flags);
      auto cfg = expand(spec).front().config;
      std::ofstream trace(trace_out, std::ios::binary);
      if (!trace) throw std::runtime_error("cannot write " + trace_out);
      std::optional<std::ofstream> messages;
      if (!messages_out.empty()) {
        messages.emplace(messages_out, std::ios::binary);
        if (!*messages) throw std::runtime_error("cannot write " + messages_out);
      }
      const auto r = run_traced(cfg, &trace, messages ? &*messages : nullptr);
      std::printf("tc_s=%g censored=%d ncc_mean=%g anc_mean=%g fairness=%g\n", r.tc_s,
                  r.tc_censored ? 1 : 0, r.ncc_mean, r.anc_mean, r.fairness);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
