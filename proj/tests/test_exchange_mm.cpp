#include <doctest.h>

#include <cmath>

#include "goldsim/exchange.hpp"
#include "goldsim/market_maker.hpp"

using namespace goldsim;

namespace {

TokenAmount oz(double v) { return TokenAmount::from_oz(v); }
Price usd(double v) { return Price::from_usd(v); }

Order limit(const Address& who, Side side, double px, double qty) {
  return Order{0, who, side, usd(px), oz(qty), {}, OrderKind::Limit};
}
Order market(const Address& who, Side side, double qty) {
  return Order{0, who, side, {}, oz(qty), {}, OrderKind::Market};
}

}  // namespace

TEST_CASE("book matches by price then time and prints at the maker's price") {
  OrderBook b;
  b.place(limit("m1", Side::Ask, 101, 1), SimTime{1});
  b.place(limit("m2", Side::Ask, 100, 1), SimTime{2});
  b.place(limit("m3", Side::Ask, 100, 1), SimTime{3});
  const PlaceResult r = b.place(limit("t", Side::Bid, 102, 2.5), SimTime{4});
  REQUIRE(r.trades.size() == 3);
  CHECK(r.trades[0].maker == "m2");
  CHECK(r.trades[1].maker == "m3");
  CHECK(r.trades[2].maker == "m1");
  CHECK(r.trades[0].price == usd(100));
  CHECK(r.trades[2].price == usd(101));
  CHECK(r.trades[2].qty == oz(0.5));
  CHECK(r.filled == oz(2.5));
  CHECK_FALSE(r.resting);
  CHECK(b.best_ask() == usd(101));
}

TEST_CASE("a limit remainder rests; a market remainder does not") {
  OrderBook b;
  b.place(limit("m", Side::Bid, 99, 1), SimTime{1});
  const PlaceResult r = b.place(limit("t", Side::Ask, 98, 3), SimTime{2});
  CHECK(r.filled == oz(1));
  REQUIRE(r.resting);
  CHECK(*r.resting == oz(2));
  CHECK(b.best_ask() == usd(98));

  const PlaceResult m = b.place(market("u", Side::Bid, 5), SimTime{3});
  CHECK(m.filled == oz(2));
  CHECK_FALSE(m.resting);
  CHECK_FALSE(b.best_ask());
}

TEST_CASE("a taker never matches its own resting orders") {
  OrderBook b;
  b.place(limit("self", Side::Ask, 100, 1), SimTime{1});
  b.place(limit("other", Side::Ask, 101, 1), SimTime{2});
  const PlaceResult r = b.place(market("self", Side::Bid, 1), SimTime{3});
  REQUIRE(r.trades.size() == 1);
  CHECK(r.trades[0].maker == "other");
  CHECK(b.orders_of("self").size() == 1);
}

TEST_CASE("halt and onboarding checks gate order entry") {
  OrderBook b;
  bool halted = true;
  b.set_halt_check([&] { return halted; });
  b.set_onboard_check([](const Address& a) { return a != "stranger"; });
  CHECK(b.place(limit("a", Side::Bid, 100, 1), SimTime{1}).status == PlaceStatus::TradingHalted);
  halted = false;
  CHECK(b.place(limit("stranger", Side::Bid, 100, 1), SimTime{1}).status == PlaceStatus::NotOnboarded);
  CHECK(b.place(limit("a", Side::Bid, 100, 0), SimTime{1}).status == PlaceStatus::InvalidOrder);
  CHECK(b.place(limit("a", Side::Bid, 100, 1), SimTime{1}).status == PlaceStatus::Accepted);
}

TEST_CASE("cancel removes resting orders") {
  OrderBook b;
  const auto id = b.place(limit("a", Side::Bid, 100, 1), SimTime{1}).order_id;
  b.place(limit("a", Side::Bid, 99, 1), SimTime{1});
  b.place(limit("b", Side::Bid, 98, 1), SimTime{1});
  CHECK(b.cancel(id));
  CHECK_FALSE(b.cancel(id));
  CHECK(b.cancel_all("a") == 1);
  CHECK(b.resting_orders() == 1);
}

TEST_CASE("depth_within counts resting size inside the band around mid") {
  OrderBook b;
  CHECK_THROWS_AS(b.depth_within(0.01), EmptySide);
  b.place(limit("m", Side::Bid, 99.5, 10), SimTime{1});
  b.place(limit("m", Side::Bid, 99.0, 20), SimTime{1});   // exactly 1% below mid 100
  b.place(limit("m", Side::Bid, 98.9, 40), SimTime{1});
  b.place(limit("m", Side::Ask, 100.5, 5), SimTime{1});
  b.place(limit("m", Side::Ask, 101.0, 7), SimTime{1});   // exactly 1% above
  b.place(limit("m", Side::Ask, 101.1, 9), SimTime{1});
  CHECK(*b.mid() == doctest::Approx(100.0 * Price::kMicroPerUsd));
  const Depth d = b.depth_within(0.01);
  CHECK(d.bid == oz(30));
  CHECK(d.ask == oz(12));
}

TEST_CASE("half-spread follows base + k * sigma, clamped to the cap") {
  const MMConfig c;
  CHECK(half_spread(c, 0.0) == doctest::Approx(0.001));
  CHECK(2 * half_spread(c, 0.0) == doctest::Approx(0.002));
  CHECK(half_spread(c, 0.0005) == doctest::Approx(0.003));
  CHECK(half_spread(c, 0.01) == doctest::Approx(0.005));
  CHECK(half_spread(c, -1.0) == doctest::Approx(0.001));
}

TEST_CASE("log-return stdev matches a direct computation") {
  const std::deque<double> p{100, 101, 100.5, 102, 101};
  std::vector<double> r;
  for (std::size_t i = 1; i < p.size(); ++i) r.push_back(std::log(p[i] / p[i - 1]));
  double m = 0;
  for (double x : r) m += x / r.size();
  double v = 0;
  for (double x : r) v += (x - m) * (x - m) / (r.size() - 1);
  CHECK(log_return_stdev(p) == doctest::Approx(std::sqrt(v)));
  CHECK(log_return_stdev({100, 101}) == 0.0);
}

TEST_CASE("ladder levels sit at max(h, offset) and round outward") {
  const MMConfig c;
  const auto lv = build_ladder(c, 2400.0, 0.002, 0.0, oz(1000));
  REQUIRE(lv.size() == 8);
  const double offsets[] = {0.002, 0.003, 0.006, 0.0095};
  for (int i = 0; i < 4; ++i) {
    CHECK(lv[i].side == Side::Bid);
    CHECK(lv[i].price.micro_usd == static_cast<std::int64_t>(std::floor(2400e6 * (1 - offsets[i]))));
    CHECK(lv[i].qty == oz(60));
    CHECK(lv[4 + i].side == Side::Ask);
    CHECK(lv[4 + i].price.micro_usd == static_cast<std::int64_t>(std::ceil(2400e6 * (1 + offsets[i]))));
  }
  // The quoted spread is never narrower than 2h.
  const double spread = static_cast<double>(lv[4].price.micro_usd - lv[0].price.micro_usd) / 2400e6;
  CHECK(spread >= 0.004);
}

TEST_CASE("ladder drops a side at the inventory limit and caps asks by capacity") {
  const MMConfig c;
  auto sides = [](const std::vector<QuoteLevel>& lv, Side s) {
    return std::count_if(lv.begin(), lv.end(), [s](const QuoteLevel& q) { return q.side == s; });
  };
  CHECK(sides(build_ladder(c, 2400, 0.001, 99.9, oz(1000)), Side::Bid) == 4);
  CHECK(sides(build_ladder(c, 2400, 0.001, 100.0, oz(1000)), Side::Bid) == 0);
  CHECK(sides(build_ladder(c, 2400, 0.001, -100.0, oz(1000)), Side::Ask) == 0);
  CHECK(sides(build_ladder(c, 2400, 0.001, -99.9, oz(1000)), Side::Ask) == 4);

  const auto capped = build_ladder(c, 2400, 0.001, 0.0, oz(90));
  CHECK(sides(capped, Side::Ask) == 2);
  CHECK(capped[5].qty == oz(30));
}

TEST_CASE("settlement nets a batch per counterparty pair") {
  Scheduler s;
  EventLog log;
  Ledger ledger(s, log);
  ledger.genesis_credit("mm", oz(100));
  ledger.genesis_credit("u", oz(100));
  ledger.genesis_reserve(oz(1000));
  Settlement st(ledger, log);

  int done = 0;
  bool all_ok = true;
  auto cb = [&](bool ok) {
    ++done;
    all_ok = all_ok && ok;
  };
  // u buys 3 from mm, then sells 1 back: one net transfer of 2 mm -> u.
  st.enqueue({Trade{1, 2, "mm", "u", Side::Bid, usd(2400), oz(3), SimTime{1}}}, cb);
  st.enqueue({Trade{3, 4, "mm", "u", Side::Ask, usd(2400), oz(1), SimTime{2}}}, cb);
  CHECK(st.pending_out("mm") == oz(3));
  CHECK(st.pending_in("mm") == oz(1));
  CHECK(st.settle_batch(SimTime{1000}) == 1);
  ledger.produce_block(SimTime{1000});
  s.run_until(SimTime{1300});
  CHECK(done == 2);
  CHECK(all_ok);
  CHECK(ledger.balance_of("u") == oz(102));
  CHECK(st.pending_out("mm") == oz(0));
  CHECK(st.trades_settled() == 2);
}

TEST_CASE("transfers reverted by a halt are retried after it lifts") {
  Scheduler s;
  EventLog log;
  Ledger ledger(s, log);
  ledger.genesis_credit("mm", oz(100));
  ledger.genesis_reserve(oz(1000));
  Settlement st(ledger, log);
  ledger.submit_tx(Tx{accounts::kRiskAgent, GovernanceTx{gov::TripBreaker{"t"}}, {}});
  ledger.produce_block(SimTime{1000});

  bool ok = false;
  int calls = 0;
  st.enqueue({Trade{1, 2, "mm", "u", Side::Bid, usd(2400), oz(1), SimTime{1}}}, [&](bool r) {
    ok = r;
    ++calls;
  });
  st.settle_batch(SimTime{1000});
  ledger.produce_block(SimTime{2000});
  s.run_until(SimTime{2300});
  CHECK(calls == 0);
  CHECK(st.awaiting_retry() == 1);

  ledger.submit_tx(Tx{accounts::kOperator, GovernanceTx{gov::Unpause{}}, {}});
  ledger.produce_block(SimTime{3000});
  st.settle_batch(SimTime{4000});
  ledger.produce_block(SimTime{4000});
  s.run_until(SimTime{4300});
  CHECK(calls == 1);
  CHECK(ok);
  CHECK(ledger.balance_of("u") == oz(1));
  CHECK(st.retries() == 1);
}
