#include <doctest.h>

#include <algorithm>

#include "goldsim/compliance.hpp"
#include "goldsim/risk.hpp"

using namespace goldsim;

namespace {

TokenAmount oz(double v) { return TokenAmount::from_oz(v); }

struct Rig {
  Scheduler scheduler;
  EventLog log;
  Ledger ledger{scheduler, log};
  Oracle oracle{PriceProcessConfig{}, 1};
  RiskAgent risk{RiskConfig{}, ledger, oracle, log};

  // Publishes prices each second and runs a risk cycle at +300 ms, up to `until`.
  void run(Millis from, Millis until) {
    for (Millis t = from; t <= until; t += 1000) {
      oracle.publish(SimTime{t});
      risk.cycle(SimTime{t + 300});
    }
  }

  std::size_t count(AlertKind k) const {
    return static_cast<std::size_t>(std::count_if(risk.alerts().begin(), risk.alerts().end(),
                                                  [k](const RiskAlert& a) { return a.kind == k; }));
  }
};

}  // namespace

TEST_CASE("admission gate spaces starts at the service interval") {
  AdmissionGate g(1000.0);
  CHECK(g.admit(SimTime{100}) == SimTime{100});
  CHECK(g.admit(SimTime{100}) == SimTime{101});
  CHECK(g.admit(SimTime{100}) == SimTime{102});
  // Idle time is not banked.
  CHECK(g.admit(SimTime{500}) == SimTime{500});
  CHECK(g.admitted_between(SimTime{100}, SimTime{102}) == 2);
  CHECK(g.total() == 4);
}

TEST_CASE("admission gate holds its rate under a backlog") {
  AdmissionGate g(5185.0);
  SimTime last{};
  for (int i = 0; i < 51'850; ++i) last = g.admit(SimTime{0});
  CHECK(last.ms == doctest::Approx(10'000).epsilon(0.001));
}

TEST_CASE("holder crossing the concentration limit raises one flag; exactly 20% raises none") {
  Rig r;
  r.ledger.genesis_credit("a", oz(250));
  r.ledger.genesis_credit("b", oz(200));
  r.ledger.genesis_credit("c", oz(550));
  r.ledger.genesis_credit(accounts::kMarketMaker, oz(0.001));
  r.ledger.genesis_reserve(oz(2000));
  r.run(1000, 5000);
  // a: 25% -> flagged once; b: 19.99998% -> not; c: 55% -> flagged; mm exempt.
  CHECK(r.count(AlertKind::Concentration) == 2);
  for (const RiskAlert& a : r.risk.alerts()) CHECK(a.action_taken == "flagged");
  CHECK_FALSE(r.ledger.state().trading_paused());
}

TEST_CASE("exactly 20% of supply is not concentrated") {
  Rig r;
  r.ledger.genesis_credit("b", oz(200));
  r.ledger.genesis_credit("x", oz(200));
  r.ledger.genesis_credit("y", oz(200));
  r.ledger.genesis_credit("z", oz(200));
  r.ledger.genesis_credit("w", oz(200));
  r.ledger.genesis_reserve(oz(2000));
  r.run(1000, 3000);
  CHECK(r.count(AlertKind::Concentration) == 0);
}

TEST_CASE("reserve shortfall freezes issuance and clears only after coverage and a clear") {
  Rig r;
  r.ledger.genesis_credit("a", oz(100));
  r.ledger.genesis_reserve(oz(99));
  r.ledger.start(SimTime{0});
  for (Millis t = 0; t <= 3000; t += 1000) {
    r.scheduler.run_until(SimTime{t + 300});
    r.risk.cycle(SimTime{t + 300});
  }
  CHECK(r.count(AlertKind::ReserveShortfall) == 1);
  CHECK(r.risk.issuance_frozen());
  r.scheduler.run_until(SimTime{4000});
  CHECK(r.ledger.state().issuance_paused());

  r.ledger.submit_tx(Tx{accounts::kAuditor, SetReserveTx{oz(100)}, {}});
  r.ledger.submit_tx(Tx{accounts::kOperator, GovernanceTx{gov::ClearFreeze{}}, {}});
  r.scheduler.run_until(SimTime{5300});
  CHECK_FALSE(r.ledger.state().issuance_paused());
  r.risk.cycle(SimTime{5300});
  CHECK_FALSE(r.risk.issuance_frozen());
  CHECK(r.count(AlertKind::ReserveShortfall) == 1);
}

TEST_CASE("a stuck primary is detected at the staleness threshold and trips the breaker") {
  Rig r;
  r.ledger.genesis_reserve(oz(10));
  r.ledger.start(SimTime{0});
  r.oracle.inject_fault(FeedId::Primary, FaultKind::Stuck, 0, SimTime{10'000}, 60'000);
  for (Millis t = 500; t <= 30'500; t += 1000) {
    r.scheduler.run_until(SimTime{t - 200});
    r.risk.cycle(SimTime{t - 200});
    r.scheduler.run_until(SimTime{t});
    r.oracle.publish(SimTime{t});
  }
  REQUIRE(r.count(AlertKind::OracleStale) == 1);
  // Last primary sample at 9.5 s; cycles run at x.3 s, so the first with a 10 s gap is 20.3 s.
  CHECK(r.risk.alerts().front().raised_at == SimTime{20'300});
  CHECK(r.oracle.consumer_feed() == FeedId::Secondary);
  CHECK(r.ledger.state().trading_paused());
  CHECK(r.ledger.state().reference_feed == FeedId::Secondary);
}

TEST_CASE("screening rules: sanctions and region deny, low confidence goes to review") {
  const ComplianceAgent agent;
  RngStream rng(1, "compliance");
  UserProfile clean{"u1", "US", false, 0.97, true, 1};
  CHECK(agent.screen(clean, SimTime{0}, rng).outcome == ComplianceOutcome::Approved);

  UserProfile sanctioned = clean;
  sanctioned.sanctions_match = true;
  CHECK(agent.screen(sanctioned, SimTime{0}, rng).outcome == ComplianceOutcome::Denied);

  UserProfile region = clean;
  region.region = "KP";
  CHECK(agent.screen(region, SimTime{0}, rng).outcome == ComplianceOutcome::Denied);

  UserProfile docs = clean;
  docs.docs_valid = false;
  CHECK(agent.screen(docs, SimTime{0}, rng).outcome == ComplianceOutcome::Denied);

  UserProfile edge = clean;
  edge.face_match_confidence = 0.90;
  CHECK(agent.screen(edge, SimTime{0}, rng).outcome == ComplianceOutcome::Approved);

  UserProfile low = clean;
  low.face_match_confidence = 0.85;
  const ComplianceDecision d = agent.screen(low, SimTime{1000}, rng);
  CHECK(d.outcome == ComplianceOutcome::ManualReview);
  REQUIRE(d.review_resolved_at);
  const Millis review = *d.review_resolved_at - d.decided_at;
  CHECK(review >= minutes_ms(30));
  CHECK(review <= hours_ms(2));
}

TEST_CASE("generated corpus has exactly the requested mix") {
  RngStream rng(3, "profiles");
  const auto profiles = generate_profiles(CorpusSpec{48, 2, 1, 0}, rng);
  REQUIRE(profiles.size() == 51);
  const ComplianceAgent agent;
  RngStream srng(3, "screen");
  std::map<ComplianceOutcome, int> counts;
  for (const UserProfile& p : profiles) ++counts[agent.screen(p, SimTime{0}, srng).outcome];
  CHECK(counts[ComplianceOutcome::Approved] == 48);
  CHECK(counts[ComplianceOutcome::ManualReview] == 2);
  CHECK(counts[ComplianceOutcome::Denied] == 1);
  CHECK(profiles.front().id == "user:00000");
}

TEST_CASE("processing times never fall below the floor") {
  ComplianceConfig cfg;
  cfg.processing_mean_ms = 60'000;
  cfg.processing_sd_ms = 60'000;
  const ComplianceAgent agent(cfg);
  RngStream rng(4, "c");
  const UserProfile p{"u", "US", false, 0.99, true, 1};
  for (int i = 0; i < 1000; ++i) CHECK(agent.screen(p, SimTime{0}, rng).processing_time >= 60'000);
}
