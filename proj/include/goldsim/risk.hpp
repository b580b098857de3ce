#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goldsim/ledger.hpp"
#include "goldsim/oracle.hpp"
#include "goldsim/sim_core.hpp"

namespace goldsim {

enum class AlertKind { OracleStale, OracleDiverged, ReserveShortfall, Concentration, GovernanceOutOfBounds };

std::string_view to_string(AlertKind k);

struct RiskAlert {
  AlertKind kind{AlertKind::OracleStale};
  SimTime raised_at{};
  std::string subject;  // feed, holder or proposal the alert is about
  std::string action_taken;
  std::optional<SimTime> cleared_at;
};

struct RiskConfig {
  Millis cycle{1000};
  Millis phase{300};  // offset of each cycle within the block interval
  Millis staleness_threshold{seconds_ms(10)};
  Ppm concentration_limit{200'000};
  double service_rate{6100.0};   // screening checks per second
  double safety_ceiling{0.85};   // fraction of service_rate admitted to user traffic
  std::set<Address> exempt_holders{accounts::kMarketMaker, accounts::kColdStorage, accounts::kFees,
                                   accounts::kExchange, accounts::kIssuer};
};

// FIFO admission at a fixed rate (GCRA). Admission times are non-decreasing.
class AdmissionGate {
 public:
  explicit AdmissionGate(double rate_per_s) : interval_ms_(1000.0 / rate_per_s) {}

  SimTime admit(SimTime now);
  // Admissions with start time in [from, to).
  std::size_t admitted_between(SimTime from, SimTime to);
  std::uint64_t total() const { return total_; }

 private:
  double interval_ms_;
  double tat_ms_{0.0};
  std::deque<std::int64_t> starts_;
  std::uint64_t total_{0};
};

// Monitors oracle health, reserve coverage, holder concentration and
// governance rejections once per cycle, and screens user actions through the
// admission gate.
class RiskAgent {
 public:
  using AlertObserver = std::function<void(const RiskAlert&)>;
  using UpdateObserver = std::function<void(const AgentUpdate&)>;

  RiskAgent(RiskConfig config, Ledger& ledger, Oracle& oracle, EventLog& log, Address self = accounts::kRiskAgent);

  void cycle(SimTime now);
  SimTime admit(SimTime now) { return gate_.admit(now); }

  bool issuance_frozen() const { return shortfall_active_; }
  double utilization() const { return utilization_; }
  double peak_utilization() const { return peak_utilization_; }
  const std::vector<RiskAlert>& alerts() const { return alerts_; }
  const RiskConfig& config() const { return config_; }
  const std::string& version() const { return version_; }

  void on_alert(AlertObserver f) { alert_observers_.push_back(std::move(f)); }
  void on_agent_update(UpdateObserver f) { update_observers_.push_back(std::move(f)); }
  void set_version(std::string v) { version_ = std::move(v); }

 private:
  void check_oracle(SimTime now);
  void check_reserve(SimTime now);
  void check_concentration(SimTime now);
  void check_governance(SimTime now);
  void apply_updates(SimTime now);
  RiskAlert& raise(AlertKind kind, SimTime now, std::string subject, std::string action);
  void clear(std::size_t index, SimTime now);
  void submit(GovernanceAction action);

  RiskConfig config_;
  Ledger& ledger_;
  Oracle& oracle_;
  EventLog& log_;
  Address self_;
  AdmissionGate gate_;
  std::optional<std::size_t> oracle_alert_;
  std::optional<std::size_t> shortfall_alert_;
  bool shortfall_active_{false};
  bool freeze_confirmed_{false};
  std::set<Address> concentrated_;
  std::vector<RiskAlert> alerts_;
  std::vector<AlertObserver> alert_observers_;
  std::vector<UpdateObserver> update_observers_;
  double utilization_{0.0};
  double peak_utilization_{0.0};
  std::string version_{"v1"};
};

}  // namespace goldsim
