#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "goldsim/config.hpp"
#include "goldsim/exchange.hpp"
#include "goldsim/ledger.hpp"
#include "goldsim/market_maker.hpp"
#include "goldsim/oracle.hpp"
#include "goldsim/risk.hpp"
#include "goldsim/vault.hpp"
#include "goldsim/workflows.hpp"

namespace goldsim {

inline constexpr std::string_view kVersion = "goldsim 0.3.0";

// Counted toward TPS: ledger-accepted transfers, mints, burns and price posts.
inline constexpr std::string_view kTpsDefinition =
    "ledger-accepted Transfer + Mint + Burn + PostPrice transactions per simulated second";

struct Sample {
  Millis t_ms{0};
  std::optional<double> mid;          // USD
  std::optional<double> spread_frac;  // (ask - bid) / mid
  std::optional<double> bid_depth_oz;
  std::optional<double> ask_depth_oz;
  double mm_inventory_oz{0.0};
  double tps{0.0};
  double risk_util{0.0};
  std::optional<double> ref_price;  // consumer feed, USD
  double half_spread{0.0};
  std::string regime;
  bool halted{false};
  bool quoting{false};
};

struct AlertRecord {
  std::string kind;
  std::string subject;
  std::optional<Millis> onset_ms;
  Millis detected_ms{0};
  std::optional<Millis> latency_ms;
  std::string action;
  std::optional<Millis> cleared_ms;
};

struct HaltInterval {
  Millis start_ms{0};
  std::optional<Millis> end_ms;
};

struct LatencyStats {
  std::size_t count{0};
  double mean_ms{0.0};
  double p50_ms{0.0};
  double p95_ms{0.0};
  double p99_ms{0.0};
};

// Nearest-rank percentile of an unsorted sample; 0 for an empty sample.
double percentile(std::vector<double> values, double q);
LatencyStats latency_stats(const std::vector<double>& values_ms);

struct GovernanceResult {
  Millis t_ms{0};
  std::string action;
  Address by;
  bool accepted{false};
  std::string reason;
  std::uint64_t ref{0};
  Millis confirmed_ms{0};
};

struct ScriptedResult {
  Millis t_ms{0};
  std::string action;
  Address user;
  std::string outcome;
  Millis latency_ms{0};
  std::string detail;
};

struct MetricsSummary {
  std::string scenario;
  std::uint64_t seed{0};
  Millis duration_ms{0};
  Millis warmup_ms{0};
  std::size_t users{0};

  std::vector<double> tps_series;  // one entry per simulated second
  double tps_sustained{0.0};       // mean over post-warmup seconds
  double tps_peak{0.0};

  std::map<std::string, LatencyStats> latency;  // per workflow kind, plus "all" for user actions
  std::map<std::string, std::map<std::string, std::size_t>> outcomes;
  double issuance_mean_agent_ms{0.0};
  double issuance_mean_chain_ms{0.0};

  std::vector<Sample> samples;
  std::vector<AlertRecord> alerts;
  std::vector<HaltInterval> halts;
  std::size_t trades{0};
  std::size_t trades_during_halt{0};
  std::size_t reference_switches{0};  // on-chain reference feed changes
  std::optional<Millis> first_switch_ms;
  std::vector<RebalanceEvent> rebalances;

  std::map<std::string, std::size_t> compliance_counts;
  double compliance_mean_auto_approval_ms{0.0};
  Millis compliance_max_review_ms{0};

  double risk_mean_util{0.0};
  double risk_peak_util{0.0};

  std::size_t balance_sum_violations{0};  // blocks where the balances do not add up to supply
  std::size_t backing_violations{0};      // attestations where vault backing != supply
  std::size_t mints_while_frozen{0};      // accepted mints while a reserve-shortfall alert is open

  std::vector<GovernanceResult> governance;
  std::vector<ScriptedResult> scripted;
  std::map<std::string, double> final_params;

  std::size_t events{0};
  std::string digest;

  // Flat key -> value view used by `expect` checks and the acceptance gate.
  std::map<std::string, double> metrics() const;
};

nlohmann::ordered_json to_json(const MetricsSummary& s);

struct ExpectationResult {
  std::string key;
  std::optional<double> value;
  double min{0.0};
  double max{0.0};
  bool pass{false};
};

std::vector<ExpectationResult> check_expectations(const ScenarioConfig& config, const MetricsSummary& summary);

struct SimulationOptions {
  std::ostream* event_sink{nullptr};  // events.jsonl stream
  bool retain_log{true};
};

// One scenario run: builds the ledger, oracle, vault, exchange and agents from
// a config, drives users, faults and governance, and aggregates metrics.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, SimulationOptions options = {});
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Runs to duration_ms; may be called once.
  MetricsSummary run();

  const ScenarioConfig& config() const;
  Scheduler& scheduler();
  EventLog& log();
  Ledger& ledger();
  Oracle& oracle();
  Vault& vault();
  OrderBook& book();
  Settlement& settlement();
  RiskAgent& risk();
  MarketMaker& market_maker();
  IssuanceAgent& issuance();
  Orchestrator& orchestrator();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience: run a config without streaming the log.
MetricsSummary run_scenario(const ScenarioConfig& config);

// Writes metrics.csv, summary.json and alerts.csv into `dir`.
void write_outputs(const MetricsSummary& summary, const std::string& dir);
void write_metrics_csv(const MetricsSummary& summary, std::ostream& out);
void write_alerts_csv(const MetricsSummary& summary, std::ostream& out);

}  // namespace goldsim
