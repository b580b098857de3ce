#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "goldsim/exchange.hpp"
#include "goldsim/ledger.hpp"
#include "goldsim/oracle.hpp"
#include "goldsim/sim_core.hpp"

namespace goldsim {

struct MMConfig {
  double base_half_spread{0.001};
  double vol_coeff{4.0};
  double half_spread_cap{0.005};
  std::vector<double> ladder_offsets{0.0010, 0.0030, 0.0060, 0.0095};
  double level_oz{60.0};
  double inv_limit_oz{100.0};
  double rebalance_threshold_oz{50.0};
  double skew_coeff{0.001};
  Millis vol_window{seconds_ms(60)};
  double neutral_oz{300.0};
  Millis rebalance_backoff{seconds_ms(60)};
};

// h = clamp(base + vol_coeff * sigma, base, cap)
double half_spread(const MMConfig& c, double sigma);

// Sample standard deviation of consecutive log returns.
double log_return_stdev(const std::deque<double>& prices);

struct QuoteLevel {
  Side side{Side::Bid};
  Price price{};
  TokenAmount qty{};
};

// Level i sits at max(h, ladder_offsets[i]) from the anchor; the bid side is
// dropped at inventory >= +limit and the ask side at <= -limit. Prices round
// away from the anchor so the quoted spread never undercuts 2h.
std::vector<QuoteLevel> build_ladder(const MMConfig& c, double anchor_usd, double h, double inventory_oz,
                                     TokenAmount ask_capacity);

struct RebalanceEvent {
  SimTime t{};
  double inventory_oz{0.0};
  TokenAmount amount{};
  std::string source;  // "cold_storage" or "mint"
};

class MarketMaker {
 public:
  // Requests a cash-funded mint to the market maker; `done(ok)` on completion.
  using MintRequester = std::function<void(TokenAmount, std::function<void(bool)>)>;

  MarketMaker(MMConfig config, OrderBook& book, Ledger& ledger, Settlement& settlement, Oracle& oracle,
              EventLog& log, Address self = accounts::kMarketMaker);

  void set_mint_requester(MintRequester f) { mint_ = std::move(f); }

  void quote_cycle(SimTime now);
  // Returns true when a rebalance was started.
  bool rebalance(SimTime now);

  // Position including unsettled fills and in-flight rebalances, minus neutral.
  double inventory_oz() const;
  TokenAmount ask_capacity() const;
  double current_half_spread() const { return h_; }
  double sigma() const { return sigma_; }
  bool quoting() const { return quoting_; }
  const std::vector<RebalanceEvent>& rebalances() const { return rebalances_; }
  const MMConfig& config() const { return config_; }
  const std::string& version() const { return version_; }
  void apply_update(const std::string& version, const MMConfig* strategy = nullptr);

 private:
  MMConfig config_;
  OrderBook& book_;
  Ledger& ledger_;
  Settlement& settlement_;
  Oracle& oracle_;
  EventLog& log_;
  Address self_;
  MintRequester mint_;
  std::deque<double> prices_;
  double h_{0.0};
  double sigma_{0.0};
  bool quoting_{false};
  int rebalance_in_flight_{0};  // outstanding rebalance legs
  std::int64_t rebalance_pending_{0};  // signed micro-OZ heading into (+) or out of (-) the MM
  SimTime backoff_until_{};
  std::vector<RebalanceEvent> rebalances_;
  std::string version_{"v1"};
};

}  // namespace goldsim
