#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "goldsim/ledger.hpp"
#include "goldsim/sim_core.hpp"
#include "goldsim/types.hpp"

namespace goldsim {

enum class Side { Bid, Ask };
enum class OrderKind { Limit, Market };

std::string_view to_string(Side s);

struct Order {
  std::uint64_t id{0};
  Address owner;
  Side side{Side::Bid};
  Price price{};  // ignored for market orders
  TokenAmount qty{};
  SimTime placed_at{};
  OrderKind kind{OrderKind::Limit};
};

struct Trade {
  std::uint64_t maker_order{0};
  std::uint64_t taker_order{0};
  Address maker;
  Address taker;
  Side taker_side{Side::Bid};
  Price price{};  // maker's price
  TokenAmount qty{};
  SimTime t{};

  const Address& seller() const { return taker_side == Side::Ask ? taker : maker; }
  const Address& buyer() const { return taker_side == Side::Bid ? taker : maker; }
};

enum class PlaceStatus { Accepted, TradingHalted, NotOnboarded, InvalidOrder };

std::string_view to_string(PlaceStatus s);

struct PlaceResult {
  PlaceStatus status{PlaceStatus::Accepted};
  std::uint64_t order_id{0};
  std::vector<Trade> trades;
  TokenAmount filled{};
  std::optional<TokenAmount> resting;  // limit remainder left on the book
};

struct Depth {
  TokenAmount bid{};
  TokenAmount ask{};
};

class EmptySide : public std::runtime_error {
 public:
  EmptySide() : std::runtime_error("order book side is empty") {}
};

// Price-time priority book. Trades print at the maker's price; a taker never
// matches its own resting orders.
class OrderBook {
 public:
  using HaltCheck = std::function<bool()>;
  using OnboardCheck = std::function<bool(const Address&)>;
  using TradeObserver = std::function<void(const Trade&)>;

  void set_halt_check(HaltCheck f) { halted_ = std::move(f); }
  void set_onboard_check(OnboardCheck f) { onboarded_ = std::move(f); }
  void on_trade(TradeObserver f) { trade_observers_.push_back(std::move(f)); }

  PlaceResult place(Order order, SimTime now);
  bool cancel(std::uint64_t order_id);
  std::size_t cancel_all(const Address& owner);

  std::optional<Price> best_bid() const;
  std::optional<Price> best_ask() const;
  // (best_bid + best_ask) / 2 in micro-USD; nullopt if a side is empty.
  std::optional<double> mid() const;
  // Resting quantity priced within `pct` of mid on each side. Throws EmptySide.
  Depth depth_within(double pct) const;

  std::size_t resting_orders() const { return index_.size(); }
  std::vector<Order> orders_of(const Address& owner) const;

 private:
  using Level = std::deque<Order>;
  template <class Book>
  void match(Book& book, Order& taker, std::vector<Trade>& trades, SimTime now);

  std::map<std::int64_t, Level, std::greater<>> bids_;
  std::map<std::int64_t, Level> asks_;
  std::unordered_map<std::uint64_t, std::pair<Side, std::int64_t>> index_;
  std::uint64_t next_id_{1};
  HaltCheck halted_;
  OnboardCheck onboarded_;
  std::vector<TradeObserver> trade_observers_;
};

// Nets each batch of trades per counterparty pair and submits one ledger
// transfer per pair with a non-zero net. Transfers reverted by a trading halt
// are resubmitted on the first batch after the halt lifts.
class Settlement {
 public:
  using Done = std::function<void(bool ok)>;

  Settlement(Ledger& ledger, EventLog& log, Address settler = accounts::kExchange);

  // Registers trades from one taker order; `done` fires once every transfer
  // covering them is confirmed.
  void enqueue(const std::vector<Trade>& trades, Done done);
  // Submits the netted transfers for everything enqueued since the last batch.
  std::size_t settle_batch(SimTime now);

  TokenAmount pending_out(const Address& a) const;
  TokenAmount pending_in(const Address& a) const;
  std::size_t awaiting_retry() const { return retry_.size(); }
  std::uint64_t retries() const { return retries_; }
  double fees_usd() const { return fees_usd_; }
  std::uint64_t trades_settled() const { return trades_settled_; }

 private:
  struct Entry {
    std::size_t outstanding{0};
    bool ok{true};
    Done done;
  };
  struct Leg {
    Address seller;
    Address buyer;
    TokenAmount qty;
  };
  struct Transfer {
    Address from;
    Address to;
    TokenAmount amount;
    std::vector<Leg> legs;
    std::vector<std::shared_ptr<Entry>> entries;
  };

  void submit(Transfer t);
  void finish(const Transfer& t, bool ok);
  void clear_legs(const std::vector<Leg>& legs);
  static void release(const std::shared_ptr<Entry>& e, bool ok);

  Ledger& ledger_;
  EventLog& log_;
  Address settler_;
  std::vector<std::pair<Trade, std::shared_ptr<Entry>>> batch_;
  std::vector<Transfer> retry_;
  std::unordered_map<Address, TokenAmount> pending_out_;
  std::unordered_map<Address, TokenAmount> pending_in_;
  std::uint64_t retries_{0};
  std::uint64_t trades_settled_{0};
  double fees_usd_{0.0};
};

}  // namespace goldsim
