#include <doctest.h>

#include <algorithm>

#include "goldsim/simulation.hpp"
#include "reserve_fuzz.hpp"

using namespace goldsim;

TEST_CASE("no accepted mint ever exceeds the reserve ceiling and balances always sum to supply") {
  const testing::FuzzTotals t = testing::fuzz_reserve(2024, 3000);
  CHECK(t.sequences == 3000);
  CHECK(t.accepted_mints > 1000);
  CHECK(t.rejected_mints > 1000);
  CHECK(t.ceiling_violations == 0);
  CHECK(t.sum_violations == 0);
  CHECK(t.model_mismatches == 0);
}

TEST_CASE("scheduler time never runs backwards") {
  RngStream rng(3, "sched");
  Scheduler s;
  std::vector<std::pair<std::int64_t, int>> seen;
  for (int i = 0; i < 2000; ++i) {
    const SimTime at{rng.uniform_int(0, 10'000)};
    const int pri = static_cast<int>(rng.uniform_int(0, 3));
    s.schedule(at, pri, "e", [&seen, &s, pri] { seen.emplace_back(s.now().ms, pri); });
  }
  s.run_until(SimTime{10'000});
  REQUIRE(seen.size() == 2000);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("vault backing tracks supply and locks stay within holdings across a busy run") {
  ScenarioConfig c;
  c.name = "props";
  c.seed = 99;
  c.duration_ms = 300'000;
  c.users.count = 60;
  c.users.think_time_mean_ms = 1'500;
  c.users.action_mix = {0.3, 0.3, 0.2, 0.2};
  c.vault.initial_oz = 3000;
  Simulation sim(c, SimulationOptions{nullptr, false});
  std::size_t lock_violations = 0;
  sim.ledger().on_block_executed([&](const Block&) {
    const Vault& v = sim.vault();
    if (v.locked() < TokenAmount{} || v.locked() > v.total()) ++lock_violations;
  });
  const MetricsSummary s = sim.run();
  CHECK(lock_violations == 0);
  CHECK(s.balance_sum_violations == 0);
  CHECK(s.backing_violations == 0);
  CHECK(sim.vault().total() >= sim.vault().allocated());
}

TEST_CASE("risk alerts are never raised without a matching condition in a fault-free run") {
  ScenarioConfig c;
  c.name = "quiet";
  c.seed = 4;
  c.duration_ms = 600'000;
  c.users.count = 50;
  c.users.action_mix = {0.45, 0.45, 0.05, 0.05};
  c.vault.initial_oz = 5000;
  const MetricsSummary s = run_scenario(c);
  for (const AlertRecord& a : s.alerts) {
    CHECK_MESSAGE(a.kind == "Concentration", a.kind);
  }
  CHECK(s.halts.empty());
}
