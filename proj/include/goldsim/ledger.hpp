#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "goldsim/governance.hpp"
#include "goldsim/params.hpp"
#include "goldsim/pause.hpp"
#include "goldsim/sim_core.hpp"
#include "goldsim/types.hpp"

namespace goldsim {

namespace revert {
inline constexpr std::string_view kReserveCeiling = "Reserve ceiling exceeded";
inline constexpr std::string_view kIssuancePaused = "issuance paused";
inline constexpr std::string_view kTradingHalted = "trading halted";
inline constexpr std::string_view kInsufficientBalance = "insufficient balance";
inline constexpr std::string_view kUnauthorized = "unauthorized";
inline constexpr std::string_view kInvalidAmount = "invalid amount";
inline constexpr std::string_view kReserveNotCovered = "reserve not covered";
inline constexpr std::string_view kNotPaused = "not paused";
}  // namespace revert

struct MintTx {
  Address to;
  TokenAmount amount;
  std::string batch_id;
};
struct BurnTx {
  Address from;
  TokenAmount amount;
};
struct TransferTx {
  Address from;
  Address to;
  TokenAmount amount;
};
struct PostPriceTx {
  PriceSample sample;
};
struct SetReserveTx {
  TokenAmount amount;
};

// Privileged controls and governance actions share the governance tx kind.
namespace gov {
struct TripBreaker {
  std::string reason;
};
struct FreezeIssuance {
  std::string reason;
};
struct ClearFreeze {};
struct Unpause {};
struct SetReferenceFeed {
  FeedId feed;
};
struct ProposeParam {
  ParamKey key;
  std::int64_t value;
};
struct CastVote {
  std::uint64_t proposal;
  bool support;
};
struct ExecuteParam {
  std::uint64_t proposal;
};
struct ProposeUpdate {
  AgentUpdate update;
};
struct SignUpdate {
  std::uint64_t proposal;
};
}  // namespace gov

using GovernanceAction = std::variant<gov::TripBreaker, gov::FreezeIssuance, gov::ClearFreeze, gov::Unpause,
                                      gov::SetReferenceFeed, gov::ProposeParam, gov::CastVote, gov::ExecuteParam,
                                      gov::ProposeUpdate, gov::SignUpdate>;

struct GovernanceTx {
  GovernanceAction action;
};

enum class TxKind { Mint, Burn, Transfer, PostPrice, SetReserve, Governance };

std::string_view to_string(TxKind k);

using TxPayload = std::variant<MintTx, BurnTx, TransferTx, PostPriceTx, SetReserveTx, GovernanceTx>;

struct Tx {
  Address sender;
  TxPayload payload;
  SimTime submitted_at{};

  TxKind kind() const { return static_cast<TxKind>(payload.index()); }
};

using TxId = std::uint64_t;

struct Receipt {
  TxId id{0};
  TxKind kind{TxKind::Transfer};
  bool accepted{false};
  std::string reason;    // revert reason, or governance outcome
  std::uint64_t ref{0};  // proposal id created/affected, when relevant
  std::uint64_t height{0};
  SimTime block_time{};
};

struct Block {
  std::uint64_t height{0};
  SimTime timestamp{};
  std::vector<Receipt> receipts;
  std::size_t accepted{0};
  std::size_t reverted{0};
};

struct LedgerState {
  std::unordered_map<Address, TokenAmount> balances;
  TokenAmount total_supply{};
  TokenAmount attested_reserve{};
  ParamStore params{ParamStore::defaults()};
  PauseController pause;
  FeedId reference_feed{FeedId::Primary};

  bool issuance_paused() const { return pause.state().issuance_paused; }
  bool trading_paused() const { return pause.state().trading_paused; }
  TokenAmount epsilon() const { return params.epsilon(); }
  bool reserve_covers_supply() const { return total_supply <= attested_reserve + epsilon(); }
};

enum class TripDecision { NoTrip, Trip };

// Trips when max over samples s in [now - window_len, now] of |p_now / p_s - 1|
// exceeds threshold, where p_now is the latest sample. Exact integer math.
TripDecision evaluate_breaker(const std::deque<PriceSample>& window, SimTime now, Millis window_len, Ppm threshold);

struct GovernanceRejection {
  std::uint64_t proposal{0};
  ParamKey key{};
  std::int64_t value{0};
  SimTime at{};
};

struct LedgerConfig {
  Millis block_interval{1000};
  Millis commit_latency{300};
  std::size_t max_tx_per_block{0};  // 0 = unlimited
  std::set<Address> auditors{accounts::kAuditor};
  std::set<Address> minters{accounts::kIssuer};
  std::set<Address> settlers{accounts::kExchange};
  std::set<Address> risk_controllers{accounts::kRiskAgent};
  std::set<Address> operators{accounts::kOperator};
  std::set<Address> oracles{accounts::kOracle};
  GovernanceConfig governance;
  LogLevel log_level{LogLevel::Full};
};

// Simulated chain: fixed-cadence block production, the token contract with the
// reserve-ceiling check, the circuit breaker and the parameter store.
class Ledger {
 public:
  using ReceiptCallback = std::function<void(const Receipt&)>;
  using BlockObserver = std::function<void(const Block&)>;

  Ledger(Scheduler& scheduler, EventLog& log, LedgerConfig config = {},
         BoundsRegistry bounds = BoundsRegistry::defaults(), ParamStore params = ParamStore::defaults());

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  // Schedules block production at first_block and every block_interval after.
  void start(SimTime first_block = SimTime{0});

  // Queues a tx for the next block boundary; the callback fires once the block
  // is committed (block time + commit latency).
  TxId submit_tx(Tx tx, ReceiptCallback on_confirm = {});

  // Executes queued txs in submission order. Called by the scheduler.
  Block produce_block(SimTime now);

  // Contract entry points; only valid inside block processing.
  Receipt execute_mint(const Address& sender, const Address& to, TokenAmount amount);
  Receipt execute_burn(const Address& sender, const Address& owner, TokenAmount amount);
  Receipt execute_transfer(const Address& sender, const Address& from, const Address& to, TokenAmount amount);
  Receipt set_attested_reserve(const Address& auditor, TokenAmount amount);
  TripDecision evaluate_breaker(SimTime now);
  bool breaker_auto_lift(SimTime now);

  // Scenario genesis; bypasses the contract.
  void genesis_credit(const Address& to, TokenAmount amount);
  void genesis_reserve(TokenAmount amount);

  void on_block_executed(BlockObserver obs) { executed_observers_.push_back(std::move(obs)); }
  void on_block_committed(BlockObserver obs) { committed_observers_.push_back(std::move(obs)); }

  std::vector<GovernanceRejection> drain_governance_rejections();
  std::vector<AgentUpdate> drain_agent_updates();

  const LedgerState& state() const { return state_; }
  TokenAmount balance_of(const Address& a) const;
  const BoundsRegistry& bounds() const { return bounds_; }
  Governance& governance() { return governance_; }
  const Governance& governance() const { return governance_; }
  const LedgerConfig& config() const { return config_; }
  const std::deque<PriceSample>& price_window(FeedId f) const {
    return f == FeedId::Primary ? primary_window_ : secondary_window_;
  }
  std::size_t pending_txs() const { return pending_.size(); }
  std::uint64_t height() const { return height_; }
  SimTime next_block_time(SimTime t) const;

 private:
  struct PendingTx {
    TxId id;
    Tx tx;
    ReceiptCallback callback;
  };

  Receipt execute(const Tx& tx, SimTime now);
  Receipt execute_governance(const Address& sender, const GovernanceTx& g, SimTime now);
  void post_price(const PriceSample& s, SimTime now);
  void log_receipt(const Tx& tx, const Receipt& r, SimTime now);
  void credit(const Address& a, TokenAmount amount);
  bool debit(const Address& a, TokenAmount amount);
  bool is_operator(const Address& a) const;

  Scheduler& scheduler_;
  EventLog& log_;
  LedgerConfig config_;
  BoundsRegistry bounds_;
  LedgerState state_;
  Governance governance_;
  std::deque<PendingTx> pending_;
  std::deque<PriceSample> primary_window_;
  std::deque<PriceSample> secondary_window_;
  std::vector<GovernanceRejection> rejections_;
  std::vector<AgentUpdate> agent_updates_;
  std::vector<BlockObserver> executed_observers_;
  std::vector<BlockObserver> committed_observers_;
  TxId next_tx_id_{1};
  std::uint64_t height_{0};
  SimTime block_now_{};
};

}  // namespace goldsim
