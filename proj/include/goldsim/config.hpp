#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "goldsim/compliance.hpp"
#include "goldsim/governance.hpp"
#include "goldsim/market_maker.hpp"
#include "goldsim/oracle.hpp"
#include "goldsim/risk.hpp"
#include "goldsim/sim_core.hpp"
#include "goldsim/workflows.hpp"

namespace goldsim {

struct ActionMix {
  double buy{0.50};
  double sell{0.35};
  double issue{0.10};
  double redeem{0.05};
};

struct UsersConfig {
  std::size_t count{100};
  std::string onboarding{"genesis"};  // "genesis" or "screen"
  Millis onboarding_window_ms{minutes_ms(10)};
  double initial_oz{10.0};
  double think_time_mean_ms{60'000.0};  // 0 disables the closed-loop load
  ActionMix action_mix;
  double size_median_oz{2.0};
  double size_sigma{0.8};
  double size_max_oz{25.0};
};

struct ComplianceSection {
  CorpusSpec corpus{48, 2, 1, 0};
  ComplianceConfig config;
};

struct VaultSection {
  double initial_oz{1000.0};
  Millis attestation_interval_ms{seconds_ms(60)};
};

struct GenesisSection {
  double mm_oz{300.0};
  double cold_oz{0.0};
  std::map<Address, double> accounts;
};

struct LedgerSection {
  double epsilon_oz{0.0};
  double breaker_swing_threshold{0.02};
  Millis breaker_window_ms{seconds_ms(300)};
  Millis breaker_cooldown_ms{seconds_ms(300)};
  double fee_rate{0.0};
  double divergence_threshold{0.005};
  Millis snapshot_interval_ms{0};  // 0 disables state snapshots
};

struct FaultSpec {
  std::string target;  // "oracle" or "vault"
  std::string feed{"primary"};
  std::string kind;    // oracle: "stuck" | "spoofed"; vault: "misreport"
  Millis start_ms{0};
  Millis duration_ms{0};
  double magnitude{0.0};
};

struct GovernanceStep {
  Millis t_ms{0};
  std::string action;  // propose, vote, execute, propose_update, sign, clear_freeze, unpause
  Address by;
  std::string param;
  double value{0.0};
  std::uint64_t proposal{0};
  bool support{true};
  std::string agent;
  std::string version;
};

struct ScriptedAction {
  Millis t_ms{0};
  WorkflowKind kind{WorkflowKind::Buy};
  Address user;
  double amount_oz{0.0};
};

struct Burst {
  WorkflowKind kind{WorkflowKind::Issue};
  std::size_t count{0};
  Millis start_ms{0};
  Millis duration_ms{0};
  double amount_oz{1.0};
};

struct ScenarioConfig {
  std::string name{"unnamed"};
  std::string description;
  int version{1};
  std::uint64_t seed{42};
  Millis duration_ms{hours_ms(1)};
  Millis block_interval_ms{1000};
  Millis commit_latency_ms{300};
  std::size_t max_tx_per_block{0};
  LogLevel log_level{LogLevel::Full};
  bool market_maker_enabled{true};
  double market_maker_cash_usd{0.0};  // 0 = unlimited cash for buy-back mints

  UsersConfig users;
  ComplianceSection compliance;
  PriceProcessConfig price_process{2400.0, 0.0, {{SimTime{0}, 5e-5, "stable"}}, {}, 0.0002};
  VaultSection vault;
  GenesisSection genesis;
  LedgerSection ledger;
  GovernanceConfig governance;
  MMConfig market_maker;
  RiskConfig risk;
  AgentTimingConfig agents;
  std::vector<FaultSpec> fault_schedule;
  std::vector<GovernanceStep> governance_schedule;
  std::vector<ScriptedAction> scripted_actions;
  std::vector<Burst> bursts;
  Millis warmup_ms{0};
  std::map<std::string, std::pair<double, double>> expect;
};

class ConfigInvalid : public std::runtime_error {
 public:
  explicit ConfigInvalid(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Parses and validates; unknown keys and out-of-range values are reported
// together with their field paths.
ScenarioConfig parse_scenario(const nlohmann::ordered_json& j);
ScenarioConfig load_scenario(const std::string& path);
std::vector<std::string> validate(const ScenarioConfig& c);

// Canonical form; parse_scenario(to_json(c)) reproduces c.
nlohmann::ordered_json to_json(const ScenarioConfig& c);

std::string_view to_string(LogLevel l);

}  // namespace goldsim
