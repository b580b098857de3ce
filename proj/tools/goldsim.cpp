#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "goldsim/bench.hpp"
#include "goldsim/config.hpp"
#include "goldsim/replay.hpp"
#include "goldsim/simulation.hpp"

#ifndef GOLDSIM_SCENARIO_DIR
#define GOLDSIM_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace goldsim;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kCheckFailed = 2, kNondeterministic = 3 };

int report_config_error(const ConfigInvalid& e) {
  std::cerr << e.what() << '\n';
  return kConfigError;
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  ScenarioConfig config;
  try {
    config = load_scenario(scenario);
  } catch (const ConfigInvalid& e) {
    return report_config_error(e);
  }
  if (seed) config.seed = *seed;

  fs::create_directories(out_dir);
  std::ofstream events(fs::path(out_dir) / "events.jsonl");
  Simulation sim(config, SimulationOptions{&events, false});
  const MetricsSummary summary = sim.run();
  events.close();
  write_outputs(summary, out_dir);

  std::cout << "scenario " << summary.scenario << " seed " << summary.seed << '\n'
            << "  events " << summary.events << "  digest " << summary.digest << '\n'
            << "  tps sustained " << summary.tps_sustained << "  peak " << summary.tps_peak << '\n';
  for (const AlertRecord& a : summary.alerts) {
    std::cout << "  alert " << a.kind << " at " << a.detected_ms << " ms";
    if (a.latency_ms) std::cout << " (latency " << *a.latency_ms << " ms)";
    std::cout << ": " << a.action << '\n';
  }
  bool ok = true;
  for (const ExpectationResult& r : check_expectations(config, summary)) {
    std::cout << "  " << (r.pass ? "PASS " : "FAIL ") << r.key << " = ";
    if (r.value) {
      std::cout << *r.value;
    } else {
      std::cout << "missing";
    }
    std::cout << " expected [" << r.min << ", " << r.max << "]\n";
    ok = ok && r.pass;
  }
  std::cout << "outputs written to " << out_dir << '\n';
  return ok ? kOk : kCheckFailed;
}

int cmd_bench(const std::string& scenario, const std::vector<std::size_t>& users, const std::string& out_dir,
              bool check) {
  ScenarioConfig config;
  try {
    config = load_scenario(scenario);
  } catch (const ConfigInvalid& e) {
    return report_config_error(e);
  }
  if (!std::is_sorted(users.begin(), users.end())) {
    std::cerr << "--users must be ascending\n";
    return kConfigError;
  }
  std::cout << "# tps: " << kTpsDefinition << '\n'
            << "users  tps_sustained  tps_peak  median_ms  p95_ms  mean_util  wall_ms\n";
  const BenchReport report = run_bench(config, users, [](const BenchRow& r) {
    std::cout << r.users << "  " << r.tps_sustained << "  " << r.tps_peak << "  " << r.median_latency_ms << "  "
              << r.p95_latency_ms << "  " << r.mean_util << "  " << r.wall_ms << std::endl;
  });
  write_bench_outputs(report, out_dir);
  std::cout << "peak tps " << report.peak_tps << "  monotone " << (report.monotone ? "yes" : "no")
            << "  plateau " << (report.plateau_present ? "yes" : "no") << "  onset ";
  if (report.plateau_onset) {
    std::cout << *report.plateau_onset;
  } else {
    std::cout << "none";
  }
  std::cout << '\n';
  if (check && !(report.monotone && report.plateau_present)) return kCheckFailed;
  return kOk;
}

int cmd_replay(const std::string& log) {
  ReplayReport r;
  try {
    r = replay(log);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  std::cout << to_string(r.verdict) << "  embedded " << r.embedded_digest << "  file " << r.file_digest;
  if (!r.rerun_digest.empty()) std::cout << "  rerun " << r.rerun_digest;
  std::cout << '\n';
  if (!r.message.empty()) std::cout << r.message << '\n';
  switch (r.verdict) {
    case ReplayVerdict::Match: return kOk;
    case ReplayVerdict::DigestMismatch: return kNondeterministic;
    case ReplayVerdict::Malformed: return kConfigError;
  }
  return kConfigError;
}

int cmd_diff(const std::string& left, const std::string& right) {
  const LogDiff d = diff_logs(read_lines(left), read_lines(right));
  std::cout << "left " << d.left_events << " events, right " << d.right_events << " events\n";
  if (!d.first_divergence) {
    std::cout << "identical\n";
    return kOk;
  }
  std::cout << "first divergence at line " << *d.first_divergence << '\n';
  for (const auto& [kind, counts] : d.kind_counts) {
    std::cout << "  " << kind << ": " << counts.first << " vs " << counts.second << '\n';
  }
  for (const DivergentEvent& e : d.samples) {
    std::cout << "  [" << e.line << "]\n    < " << e.left << "\n    > " << e.right << '\n';
  }
  return kOk;
}

int cmd_list(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    try {
      const ScenarioConfig c = load_scenario(p.string());
      std::cout << c.name << " (v" << c.version << ")  " << p.string() << "\n    " << c.description << '\n';
    } catch (const ConfigInvalid& e) {
      std::cout << p.string() << "  INVALID\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gold-backed token exchange simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");

  std::vector<std::size_t> users{1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000};
  bool check = false;
  auto* bench = app.add_subcommand("bench", "Scaling sweep over user counts");
  bench->add_option("--scenario", scenario, "Scenario JSON file")->required();
  bench->add_option("--users", users, "Comma-separated ascending user counts")->delimiter(',');
  bench->add_option("--out", out_dir, "Output directory");
  bench->add_flag("--check", check, "Exit 2 unless TPS is monotone with a plateau");

  std::string log;
  auto* rep = app.add_subcommand("replay", "Verify an event log by re-running it");
  rep->add_option("--log", log, "events.jsonl file")->required();

  std::string left;
  std::string right;
  auto* diff = app.add_subcommand("diff", "Compare two event logs");
  diff->add_option("left", left)->required();
  diff->add_option("right", right)->required();

  std::string dir = GOLDSIM_SCENARIO_DIR;
  auto* scenarios = app.add_subcommand("scenarios", "Bundled scenarios");
  scenarios->require_subcommand(1);
  auto* list = scenarios->add_subcommand("list", "List bundled scenarios");
  list->add_option("--dir", dir, "Scenario directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(scenario, seed, out_dir);
    if (*bench) return cmd_bench(scenario, users, out_dir, check);
    if (*rep) return cmd_replay(log);
    if (*diff) return cmd_diff(left, right);
    if (*list) return cmd_list(dir);
  } catch (const ConfigInvalid& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
