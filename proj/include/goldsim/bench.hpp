#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "goldsim/config.hpp"

namespace goldsim {

struct BenchRow {
  std::size_t users{0};
  double tps_sustained{0.0};
  double tps_peak{0.0};
  double median_latency_ms{0.0};
  double p95_latency_ms{0.0};
  double mean_util{0.0};
  double peak_util{0.0};
  std::size_t workflows{0};
  std::string digest;
  double wall_ms{0.0};  // simulator wall-clock; reported, never asserted
};

struct BenchReport {
  std::string scenario;
  std::uint64_t seed{0};
  std::vector<BenchRow> rows;
  double peak_tps{0.0};
  bool monotone{false};                      // sustained TPS non-decreasing in user count
  std::optional<std::size_t> plateau_onset;  // first count with mean utilization > 0.8
  bool plateau_present{false};
};

inline constexpr double kPlateauUtilization = 0.8;

// Fills the derived shape fields from the rows. The plateau is present when
// the mean TPS gain per step from the onset on is below a quarter of the
// mean gain per step before it.
void analyse(BenchReport& report);

using BenchProgress = std::function<void(const BenchRow&)>;

// One run per user count, all with the scenario's seed.
BenchReport run_bench(const ScenarioConfig& base, const std::vector<std::size_t>& user_counts,
                      const BenchProgress& progress = {});

nlohmann::ordered_json to_json(const BenchReport& r);
void write_bench_csv(const BenchReport& r, std::ostream& out);
void write_bench_outputs(const BenchReport& r, const std::string& dir);

}  // namespace goldsim
