#include "goldsim/bench.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "goldsim/simulation.hpp"

namespace goldsim {

void analyse(BenchReport& r) {
  r.peak_tps = 0.0;
  r.monotone = true;
  r.plateau_onset.reset();
  std::optional<std::size_t> onset_idx;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const BenchRow& row = r.rows[i];
    r.peak_tps = std::max(r.peak_tps, row.tps_peak);
    if (i > 0 && row.tps_sustained < r.rows[i - 1].tps_sustained) r.monotone = false;
    if (!onset_idx && row.mean_util > kPlateauUtilization) onset_idx = i;
  }
  if (onset_idx) r.plateau_onset = r.rows[*onset_idx].users;

  r.plateau_present = false;
  if (onset_idx && *onset_idx >= 1 && *onset_idx + 1 < r.rows.size()) {
    const std::size_t k = *onset_idx;
    const double before = (r.rows[k].tps_sustained - r.rows[0].tps_sustained) / static_cast<double>(k);
    const double after =
        (r.rows.back().tps_sustained - r.rows[k].tps_sustained) / static_cast<double>(r.rows.size() - 1 - k);
    r.plateau_present = before > 0 && after < 0.25 * before;
  }
}

BenchReport run_bench(const ScenarioConfig& base, const std::vector<std::size_t>& user_counts,
                      const BenchProgress& progress) {
  BenchReport report;
  report.scenario = base.name;
  report.seed = base.seed;
  for (std::size_t n : user_counts) {
    ScenarioConfig c = base;
    c.users.count = n;
    c.users.onboarding = "genesis";
    const auto t0 = std::chrono::steady_clock::now();
    const MetricsSummary s = run_scenario(c);
    const auto t1 = std::chrono::steady_clock::now();

    BenchRow row;
    row.users = n;
    row.tps_sustained = s.tps_sustained;
    row.tps_peak = s.tps_peak;
    if (auto it = s.latency.find("all"); it != s.latency.end()) {
      row.median_latency_ms = it->second.p50_ms;
      row.p95_latency_ms = it->second.p95_ms;
    }
    row.mean_util = s.risk_mean_util;
    row.peak_util = s.risk_peak_util;
    for (const auto& [kind, by_outcome] : s.outcomes) {
      for (const auto& [outcome, count] : by_outcome) row.workflows += count;
    }
    row.digest = s.digest;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.rows.push_back(row);
    if (progress) progress(row);
  }
  analyse(report);
  return report;
}

nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["tps_definition"] = kTpsDefinition;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["version"] = kVersion;
  j["peak_tps"] = r.peak_tps;
  j["monotone"] = r.monotone;
  j["plateau_onset_users"] = r.plateau_onset ? nlohmann::ordered_json(*r.plateau_onset) : nlohmann::ordered_json();
  j["plateau_present"] = r.plateau_present;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const BenchRow& row : r.rows) {
    rows.push_back({{"users", row.users},
                    {"tps_sustained", row.tps_sustained},
                    {"tps_peak", row.tps_peak},
                    {"median_latency_ms", row.median_latency_ms},
                    {"p95_latency_ms", row.p95_latency_ms},
                    {"mean_util", row.mean_util},
                    {"peak_util", row.peak_util},
                    {"workflows", row.workflows},
                    {"digest", row.digest},
                    {"wall_ms", row.wall_ms}});
  }
  j["rows"] = rows;
  return j;
}

void write_bench_csv(const BenchReport& r, std::ostream& out) {
  out << "# tps: " << kTpsDefinition << '\n';
  out << "users,tps_sustained,tps_peak,median_latency_ms,p95_latency_ms,mean_util,peak_util,workflows,wall_ms\n";
  for (const BenchRow& row : r.rows) {
    out << row.users << ',' << row.tps_sustained << ',' << row.tps_peak << ',' << row.median_latency_ms << ','
        << row.p95_latency_ms << ',' << row.mean_util << ',' << row.peak_util << ',' << row.workflows << ','
        << row.wall_ms << '\n';
  }
}

void write_bench_outputs(const BenchReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(std::filesystem::path(dir) / "bench.csv");
  write_bench_csv(r, csv);
  std::ofstream json(std::filesystem::path(dir) / "bench.json");
  json << to_json(r).dump(2) << '\n';
}

}  // namespace goldsim
