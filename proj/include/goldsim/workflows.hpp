#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "goldsim/compliance.hpp"
#include "goldsim/exchange.hpp"
#include "goldsim/ledger.hpp"
#include "goldsim/risk.hpp"
#include "goldsim/sim_core.hpp"
#include "goldsim/vault.hpp"

namespace goldsim {

enum class WorkflowKind { Onboard, Buy, Sell, Issue, Redeem };

enum class WorkflowOutcome {
  Completed,
  IssuanceFrozen,
  InsufficientReserveHeadroom,
  ComplianceBlocked,
  NotOnboarded,
  InsufficientBalance,
  TradingHalted,
  NoLiquidity,
  MintReverted,
  BurnReverted,
  SettlementFailed,
};

std::string_view to_string(WorkflowKind k);
std::string_view to_string(WorkflowOutcome o);
std::optional<WorkflowKind> workflow_from_string(std::string_view s);

struct AgentTimingConfig {
  double processing_mean_ms{400.0};
  double processing_sd_ms{50.0};
  double processing_min_ms{100.0};
  double routing_mean_ms{200.0};
  double routing_sd_ms{30.0};
  double routing_min_ms{50.0};
};

struct IssuanceResult {
  WorkflowOutcome outcome{WorkflowOutcome::Completed};
  SimTime submitted_at{};   // tx handed to the ledger
  SimTime confirmed_at{};   // receipt observed
  std::string reason;
};

// Mints against vault headroom and burns on redemption. Work reverted by a
// trading halt is resubmitted after the halt lifts.
class IssuanceAgent {
 public:
  using Done = std::function<void(const IssuanceResult&)>;

  IssuanceAgent(AgentTimingConfig timing, Scheduler& scheduler, Ledger& ledger, Vault& vault, RiskAgent& risk,
                EventLog& log, std::uint64_t seed, Address self = accounts::kIssuer);

  void issue(const Address& recipient, TokenAmount amount, Done done);
  void redeem(const Address& owner, TokenAmount amount, Done done);

  TokenAmount pending_mints() const { return pending_mints_; }
  std::size_t in_flight() const { return in_flight_; }
  std::uint64_t resubmissions() const { return resubmissions_; }
  std::string version{"v1"};

 private:
  Millis processing_delay();
  void submit_mint(const Address& recipient, TokenAmount amount, LockTicket ticket, std::string batch,
                   std::shared_ptr<IssuanceResult> result, Done done);
  void submit_burn(const Address& owner, TokenAmount amount, std::shared_ptr<IssuanceResult> result, Done done);
  void flush_retries();

  AgentTimingConfig timing_;
  Scheduler& scheduler_;
  Ledger& ledger_;
  Vault& vault_;
  RiskAgent& risk_;
  EventLog& log_;
  Address self_;
  RngStream rng_;
  TokenAmount pending_mints_{};
  std::size_t in_flight_{0};
  std::uint64_t batches_{0};
  std::uint64_t resubmissions_{0};
  std::vector<std::function<void()>> retry_;
};

struct UserAction {
  WorkflowKind kind{WorkflowKind::Buy};
  Address user;
  TokenAmount amount{};
};

struct WorkflowRecord {
  std::uint64_t id{0};
  WorkflowKind kind{WorkflowKind::Buy};
  Address user;
  TokenAmount amount{};
  SimTime started{};
  SimTime finished{};
  WorkflowOutcome outcome{WorkflowOutcome::Completed};
  std::optional<Millis> agent_ms;  // issue/redeem: request to tx submission
  std::optional<Millis> chain_ms;  // issue/redeem: submission to confirmation
  std::string detail;

  Millis latency() const { return finished - started; }
};

enum class OnboardingStatus { Unknown, Screening, InReview, Approved, Denied };

struct ComplianceRecord {
  Address user;
  ComplianceDecision decision;
  SimTime requested_at{};
};

// Routes user actions through the agents in order: compliance gate, risk
// admission, then the exchange or the issuance agent.
class Orchestrator {
 public:
  using Done = std::function<void(const WorkflowRecord&)>;

  Orchestrator(AgentTimingConfig timing, Scheduler& scheduler, Ledger& ledger, OrderBook& book,
               Settlement& settlement, IssuanceAgent& issuance, const ComplianceAgent& compliance, RiskAgent& risk,
               EventLog& log, std::uint64_t seed, LogLevel level);

  void register_user(const UserProfile& profile, bool preapproved);
  std::uint64_t handle(const UserAction& action, Done done = {});

  OnboardingStatus status(const Address& user) const;
  bool onboarded(const Address& user) const { return status(user) == OnboardingStatus::Approved; }
  TokenAmount available(const Address& user) const;
  const std::vector<ComplianceRecord>& compliance_records() const { return compliance_; }
  std::size_t active_workflows() const { return active_; }

 private:
  struct Workflow;
  void start(std::shared_ptr<Workflow> wf);
  void finish(const std::shared_ptr<Workflow>& wf, WorkflowOutcome outcome, std::string detail = {});
  void run_onboard(std::shared_ptr<Workflow> wf);
  void run_trade(std::shared_ptr<Workflow> wf);
  void run_issue(std::shared_ptr<Workflow> wf);
  void run_redeem(std::shared_ptr<Workflow> wf);
  Millis routing_delay();

  AgentTimingConfig timing_;
  Scheduler& scheduler_;
  Ledger& ledger_;
  OrderBook& book_;
  Settlement& settlement_;
  IssuanceAgent& issuance_;
  const ComplianceAgent& compliance_agent_;
  RiskAgent& risk_;
  EventLog& log_;
  LogLevel level_;
  RngStream routing_rng_;
  RngStream compliance_rng_;
  std::unordered_map<Address, UserProfile> profiles_;
  std::unordered_map<Address, OnboardingStatus> status_;
  std::unordered_map<Address, TokenAmount> reserved_;
  std::vector<ComplianceRecord> compliance_;
  std::uint64_t next_id_{1};
  std::size_t active_{0};
};

}  // namespace goldsim
