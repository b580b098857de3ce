#include "goldsim/market_maker.hpp"

#include <algorithm>
#include <cmath>

namespace goldsim {

double half_spread(const MMConfig& c, double sigma) {
  return std::clamp(c.base_half_spread + c.vol_coeff * sigma, c.base_half_spread, c.half_spread_cap);
}

double log_return_stdev(const std::deque<double>& prices) {
  if (prices.size() < 3) return 0.0;
  std::vector<double> r;
  r.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) r.push_back(std::log(prices[i] / prices[i - 1]));
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(r.size() - 1));
}

std::vector<QuoteLevel> build_ladder(const MMConfig& c, double anchor_usd, double h, double inventory_oz,
                                     TokenAmount ask_capacity) {
  std::vector<QuoteLevel> out;
  const double anchor = anchor_usd * Price::kMicroPerUsd;
  const TokenAmount level = TokenAmount::from_oz(c.level_oz);
  if (inventory_oz < c.inv_limit_oz) {
    for (double off : c.ladder_offsets) {
      const double d = std::max(h, off);
      out.push_back({Side::Bid, Price{static_cast<std::int64_t>(std::floor(anchor * (1.0 - d)))}, level});
    }
  }
  if (inventory_oz > -c.inv_limit_oz) {
    TokenAmount left = ask_capacity;
    for (double off : c.ladder_offsets) {
      const TokenAmount qty = std::min(level, left);
      if (qty.micro <= 0) break;
      const double d = std::max(h, off);
      out.push_back({Side::Ask, Price{static_cast<std::int64_t>(std::ceil(anchor * (1.0 + d)))}, qty});
      left -= qty;
    }
  }
  return out;
}

MarketMaker::MarketMaker(MMConfig config, OrderBook& book, Ledger& ledger, Settlement& settlement, Oracle& oracle,
                         EventLog& log, Address self)
    : config_(std::move(config)),
      book_(book),
      ledger_(ledger),
      settlement_(settlement),
      oracle_(oracle),
      log_(log),
      self_(std::move(self)) {}

double MarketMaker::inventory_oz() const {
  const std::int64_t pos = ledger_.balance_of(self_).micro - settlement_.pending_out(self_).micro +
                           settlement_.pending_in(self_).micro + rebalance_pending_;
  return TokenAmount{pos}.oz() - config_.neutral_oz;
}

TokenAmount MarketMaker::ask_capacity() const {
  std::int64_t cap = ledger_.balance_of(self_).micro - settlement_.pending_out(self_).micro;
  if (rebalance_pending_ < 0) cap += rebalance_pending_;
  return TokenAmount{std::max<std::int64_t>(cap, 0)};
}

void MarketMaker::apply_update(const std::string& version, const MMConfig* strategy) {
  version_ = version;
  if (strategy != nullptr) config_ = *strategy;
}

void MarketMaker::quote_cycle(SimTime now) {
  const auto ref = oracle_.consumer_price();
  if (ref) {
    prices_.push_back(ref->price.usd());
    const auto keep = static_cast<std::size_t>(config_.vol_window / 1000) + 1;
    while (prices_.size() > keep) prices_.pop_front();
  }
  book_.cancel_all(self_);
  quoting_ = false;
  if (ledger_.state().trading_paused() || !ref) return;

  sigma_ = log_return_stdev(prices_);
  h_ = half_spread(config_, sigma_);
  rebalance(now);

  const double inv = inventory_oz();
  const double anchor = ref->price.usd() * (1.0 - config_.skew_coeff * inv / config_.inv_limit_oz);
  for (const QuoteLevel& q : build_ladder(config_, anchor, h_, inv, ask_capacity())) {
    Order o;
    o.owner = self_;
    o.side = q.side;
    o.price = q.price;
    o.qty = q.qty;
    o.kind = OrderKind::Limit;
    book_.place(std::move(o), now);
  }
  quoting_ = true;
}

bool MarketMaker::rebalance(SimTime now) {
  if (rebalance_in_flight_ > 0 || now < backoff_until_) return false;
  const double inv = inventory_oz();
  if (std::abs(inv) < config_.rebalance_threshold_oz) return false;

  const TokenAmount amount = TokenAmount::from_oz(std::abs(inv));
  RebalanceEvent ev{now, inv, amount, ""};
  if (inv > 0) {
    ev.source = "cold_storage";
    ++rebalance_in_flight_;
    rebalance_pending_ -= amount.micro;
    ledger_.submit_tx(Tx{self_, TransferTx{self_, accounts::kColdStorage, amount}, {}},
                      [this, amount](const Receipt&) {
                        rebalance_pending_ += amount.micro;
                        --rebalance_in_flight_;
                      });
  } else {
    // Cold storage first; any remainder is minted.
    const TokenAmount from_cold{std::min(ledger_.balance_of(accounts::kColdStorage).micro, amount.micro)};
    const TokenAmount to_mint{amount.micro - from_cold.micro};
    if (to_mint.micro > 0 && !mint_) return false;
    if (from_cold.micro > 0) {
      ev.source = "cold_storage";
      ++rebalance_in_flight_;
      rebalance_pending_ += from_cold.micro;
      ledger_.submit_tx(Tx{accounts::kColdStorage, TransferTx{accounts::kColdStorage, self_, from_cold}, {}},
                        [this, from_cold](const Receipt&) {
                          rebalance_pending_ -= from_cold.micro;
                          --rebalance_in_flight_;
                        });
    }
    if (to_mint.micro > 0) {
      ev.source = from_cold.micro > 0 ? "cold_storage+mint" : "mint";
      ++rebalance_in_flight_;
      rebalance_pending_ += to_mint.micro;
      mint_(to_mint, [this, to_mint, now](bool ok) {
        rebalance_pending_ -= to_mint.micro;
        --rebalance_in_flight_;
        if (!ok) backoff_until_ = now + config_.rebalance_backoff;
      });
    }
  }
  rebalances_.push_back(ev);
  log_.append(now, "mm", "rebalance",
              {{"inventory_oz", inv}, {"amount", amount.micro}, {"direction", inv > 0 ? "to_cold" : "to_mm"},
               {"source", ev.source}});
  return true;
}

}  // namespace goldsim
