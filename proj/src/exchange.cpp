#include "goldsim/exchange.hpp"

#include <algorithm>

namespace goldsim {

std::string_view to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

std::string_view to_string(PlaceStatus s) {
  switch (s) {
    case PlaceStatus::Accepted: return "accepted";
    case PlaceStatus::TradingHalted: return "trading_halted";
    case PlaceStatus::NotOnboarded: return "not_onboarded";
    case PlaceStatus::InvalidOrder: return "invalid_order";
  }
  return "unknown";
}

template <class Book>
void OrderBook::match(Book& book, Order& taker, std::vector<Trade>& trades, SimTime now) {
  for (auto lvl = book.begin(); lvl != book.end() && taker.qty.micro > 0;) {
    const std::int64_t px = lvl->first;
    if (taker.kind == OrderKind::Limit) {
      const bool crosses = taker.side == Side::Bid ? px <= taker.price.micro_usd : px >= taker.price.micro_usd;
      if (!crosses) break;
    }
    Level& q = lvl->second;
    for (auto it = q.begin(); it != q.end() && taker.qty.micro > 0;) {
      if (it->owner == taker.owner) {
        ++it;
        continue;
      }
      const TokenAmount fill = std::min(it->qty, taker.qty);
      trades.push_back(Trade{it->id, taker.id, it->owner, taker.owner, taker.side, Price{px}, fill, now});
      it->qty -= fill;
      taker.qty -= fill;
      if (it->qty.micro == 0) {
        index_.erase(it->id);
        it = q.erase(it);
      } else {
        ++it;
      }
    }
    if (q.empty()) {
      lvl = book.erase(lvl);
    } else {
      ++lvl;
    }
  }
}

PlaceResult OrderBook::place(Order order, SimTime now) {
  PlaceResult r;
  if (halted_ && halted_()) {
    r.status = PlaceStatus::TradingHalted;
    return r;
  }
  if (onboarded_ && !onboarded_(order.owner)) {
    r.status = PlaceStatus::NotOnboarded;
    return r;
  }
  if (order.qty.micro <= 0 || (order.kind == OrderKind::Limit && order.price.micro_usd <= 0)) {
    r.status = PlaceStatus::InvalidOrder;
    return r;
  }
  order.id = next_id_++;
  order.placed_at = now;
  r.order_id = order.id;
  const TokenAmount requested = order.qty;
  if (order.side == Side::Bid) {
    match(asks_, order, r.trades, now);
  } else {
    match(bids_, order, r.trades, now);
  }
  r.filled = requested - order.qty;
  for (const Trade& t : r.trades) {
    for (auto& obs : trade_observers_) obs(t);
  }
  if (order.kind == OrderKind::Limit && order.qty.micro > 0) {
    r.resting = order.qty;
    index_.emplace(order.id, std::make_pair(order.side, order.price.micro_usd));
    if (order.side == Side::Bid) {
      bids_[order.price.micro_usd].push_back(order);
    } else {
      asks_[order.price.micro_usd].push_back(order);
    }
  }
  return r;
}

bool OrderBook::cancel(std::uint64_t order_id) {
  auto it = index_.find(order_id);
  if (it == index_.end()) return false;
  const auto [side, px] = it->second;
  index_.erase(it);
  auto drop = [&](auto& book) {
    auto lvl = book.find(px);
    if (lvl == book.end()) return;
    auto& q = lvl->second;
    q.erase(std::remove_if(q.begin(), q.end(), [&](const Order& o) { return o.id == order_id; }), q.end());
    if (q.empty()) book.erase(lvl);
  };
  if (side == Side::Bid) {
    drop(bids_);
  } else {
    drop(asks_);
  }
  return true;
}

std::size_t OrderBook::cancel_all(const Address& owner) {
  std::vector<std::uint64_t> ids;
  for (const Order& o : orders_of(owner)) ids.push_back(o.id);
  for (std::uint64_t id : ids) cancel(id);
  return ids.size();
}

std::vector<Order> OrderBook::orders_of(const Address& owner) const {
  std::vector<Order> out;
  for (const auto& [px, q] : bids_) {
    for (const Order& o : q) {
      if (o.owner == owner) out.push_back(o);
    }
  }
  for (const auto& [px, q] : asks_) {
    for (const Order& o : q) {
      if (o.owner == owner) out.push_back(o);
    }
  }
  return out;
}

std::optional<Price> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return Price{bids_.begin()->first};
}

std::optional<Price> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return Price{asks_.begin()->first};
}

std::optional<double> OrderBook::mid() const {
  if (bids_.empty() || asks_.empty()) return std::nullopt;
  return (static_cast<double>(bids_.begin()->first) + static_cast<double>(asks_.begin()->first)) / 2.0;
}

Depth OrderBook::depth_within(double pct) const {
  if (bids_.empty() || asks_.empty()) throw EmptySide();
  const Ppm band = fraction_to_ppm(pct);
  // Compare against 2 * mid to stay in integers.
  const __int128 two_mid = static_cast<__int128>(bids_.begin()->first) + asks_.begin()->first;
  Depth d;
  for (const auto& [px, q] : bids_) {
    if (static_cast<__int128>(px) * 2 * kPpmOne < two_mid * (kPpmOne - band)) break;
    for (const Order& o : q) d.bid += o.qty;
  }
  for (const auto& [px, q] : asks_) {
    if (static_cast<__int128>(px) * 2 * kPpmOne > two_mid * (kPpmOne + band)) break;
    for (const Order& o : q) d.ask += o.qty;
  }
  return d;
}

Settlement::Settlement(Ledger& ledger, EventLog& log, Address settler)
    : ledger_(ledger), log_(log), settler_(std::move(settler)) {}

void Settlement::enqueue(const std::vector<Trade>& trades, Done done) {
  auto entry = std::make_shared<Entry>();
  entry->done = std::move(done);
  const Ppm fee = ledger_.state().params.fee_rate();
  for (const Trade& t : trades) {
    pending_out_[t.seller()] += t.qty;
    pending_in_[t.buyer()] += t.qty;
    fees_usd_ += t.price.usd() * t.qty.oz() * ppm_to_fraction(fee);
    batch_.emplace_back(t, entry);
  }
  if (trades.empty() && entry->done) entry->done(true);
}

std::size_t Settlement::settle_batch(SimTime) {
  std::size_t submitted = 0;
  if (!retry_.empty() && !ledger_.state().trading_paused()) {
    std::vector<Transfer> again;
    again.swap(retry_);
    for (Transfer& t : again) {
      ++retries_;
      submit(std::move(t));
      ++submitted;
    }
  }
  if (batch_.empty()) return submitted;

  // Net per unordered pair; map keeps pair iteration deterministic.
  struct Net {
    std::int64_t a_to_b{0};
    std::vector<Leg> legs;
    std::vector<std::shared_ptr<Entry>> entries;
  };
  std::map<std::pair<Address, Address>, Net> nets;
  for (auto& [trade, entry] : batch_) {
    const Address& s = trade.seller();
    const Address& b = trade.buyer();
    const bool forward = s < b;
    Net& n = nets[forward ? std::make_pair(s, b) : std::make_pair(b, s)];
    n.a_to_b += forward ? trade.qty.micro : -trade.qty.micro;
    n.legs.push_back(Leg{s, b, trade.qty});
    if (n.entries.empty() || n.entries.back() != entry) {
      n.entries.push_back(entry);
      ++entry->outstanding;
    }
  }
  batch_.clear();

  for (auto& [pair, n] : nets) {
    if (n.a_to_b == 0) {
      Transfer t{pair.first, pair.second, TokenAmount{}, std::move(n.legs), std::move(n.entries)};
      finish(t, true);
      continue;
    }
    Transfer t;
    t.from = n.a_to_b > 0 ? pair.first : pair.second;
    t.to = n.a_to_b > 0 ? pair.second : pair.first;
    t.amount = TokenAmount{n.a_to_b > 0 ? n.a_to_b : -n.a_to_b};
    t.legs = std::move(n.legs);
    t.entries = std::move(n.entries);
    submit(std::move(t));
    ++submitted;
  }
  return submitted;
}

void Settlement::submit(Transfer t) {
  Tx tx{settler_, TransferTx{t.from, t.to, t.amount}, {}};
  ledger_.submit_tx(std::move(tx), [this, t](const Receipt& r) mutable {
    if (r.accepted) {
      finish(t, true);
    } else if (r.reason == revert::kTradingHalted) {
      retry_.push_back(std::move(t));
    } else {
      log_.append(r.block_time + ledger_.config().commit_latency, "exchange", "settlement_failed",
                  {{"from", t.from}, {"to", t.to}, {"amount", t.amount.micro}, {"reason", r.reason}});
      finish(t, false);
    }
  });
}

void Settlement::finish(const Transfer& t, bool ok) {
  clear_legs(t.legs);
  trades_settled_ += t.legs.size();
  for (const auto& e : t.entries) release(e, ok);
}

void Settlement::clear_legs(const std::vector<Leg>& legs) {
  for (const Leg& l : legs) {
    auto out = pending_out_.find(l.seller);
    if (out != pending_out_.end()) {
      out->second -= l.qty;
      if (out->second.micro == 0) pending_out_.erase(out);
    }
    auto in = pending_in_.find(l.buyer);
    if (in != pending_in_.end()) {
      in->second -= l.qty;
      if (in->second.micro == 0) pending_in_.erase(in);
    }
  }
}

void Settlement::release(const std::shared_ptr<Entry>& e, bool ok) {
  e->ok = e->ok && ok;
  if (e->outstanding > 0 && --e->outstanding == 0 && e->done) e->done(e->ok);
}

TokenAmount Settlement::pending_out(const Address& a) const {
  auto it = pending_out_.find(a);
  return it == pending_out_.end() ? TokenAmount{} : it->second;
}

TokenAmount Settlement::pending_in(const Address& a) const {
  auto it = pending_in_.find(a);
  return it == pending_in_.end() ? TokenAmount{} : it->second;
}

}  // namespace goldsim
