#include "goldsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace goldsim {

using nlohmann::ordered_json;

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

LatencyStats latency_stats(const std::vector<double>& values_ms) {
  LatencyStats s;
  s.count = values_ms.size();
  if (values_ms.empty()) return s;
  s.mean_ms = std::accumulate(values_ms.begin(), values_ms.end(), 0.0) / static_cast<double>(values_ms.size());
  s.p50_ms = percentile(values_ms, 0.50);
  s.p95_ms = percentile(values_ms, 0.95);
  s.p99_ms = percentile(values_ms, 0.99);
  return s;
}

namespace {

constexpr double kBandLow = 0.002;
constexpr double kBandHigh = 0.005;
constexpr double kSpreadCeiling = 0.01;
// Quotes round outward to whole micro-USD, so each side may sit one tick past its fraction.
double tick_fraction(double mid_usd) { return 1.0 / (mid_usd * Price::kMicroPerUsd); }

bool counts_toward_tps(TxKind k) {
  return k == TxKind::Transfer || k == TxKind::Mint || k == TxKind::Burn || k == TxKind::PostPrice;
}

UserProfile clean_profile(const Address& id) {
  UserProfile p;
  p.id = id;
  p.region = "US";
  p.face_match_confidence = 0.99;
  return p;
}

bool is_system_account(const Address& a) {
  return a == accounts::kMarketMaker || a == accounts::kColdStorage || a == accounts::kFees ||
         a == accounts::kExchange || a == accounts::kIssuer || a == accounts::kRiskAgent ||
         a == accounts::kOracle || a == accounts::kAuditor || a == accounts::kOperator;
}

}  // namespace

struct Simulation::Impl {
  Impl(ScenarioConfig c, SimulationOptions o);

  void setup();
  void genesis();
  void register_users();
  void schedule_processes();
  void schedule_workload();
  void every(Millis first, Millis period, int prio, std::string_view kind, std::function<void(SimTime)> f);
  void fire_periodic(std::size_t i);
  void start_user_loop(const Address& user);
  void next_user_action(const Address& user);
  UserAction draw_action(const Address& user);
  void record(const WorkflowRecord& r);
  void on_block(const Block& b);
  void sample(SimTime now);
  void attest(SimTime now);
  void governance_step(std::size_t index);
  MetricsSummary finish();

  ScenarioConfig config;
  SimulationOptions options;
  EventLog log;
  Scheduler scheduler;
  Ledger ledger;
  Oracle oracle;
  Vault vault;
  OrderBook book;
  Settlement settlement;
  RiskAgent risk;
  IssuanceAgent issuance;
  ComplianceAgent compliance;
  Orchestrator orchestrator;
  MarketMaker mm;

  RngStream user_rng;
  std::vector<Address> users;
  bool ran{false};

  struct Periodic {
    Millis period;
    int prio;
    std::string_view kind;
    std::function<void(SimTime)> f;
  };
  std::vector<Periodic> periodic;

  double mm_cash_left{0.0};

  // Aggregates.
  MetricsSummary s;
  std::map<std::string, std::vector<double>> latencies;
  double agent_ms_sum{0.0};
  double chain_ms_sum{0.0};
  std::size_t issue_samples{0};
  bool halt_open{false};
  FeedId last_reference{FeedId::Primary};
};

namespace {

LedgerConfig ledger_config(const ScenarioConfig& c) {
  LedgerConfig l;
  l.block_interval = c.block_interval_ms;
  l.commit_latency = c.commit_latency_ms;
  l.max_tx_per_block = c.max_tx_per_block;
  l.governance = c.governance;
  l.log_level = c.log_level;
  return l;
}

ParamStore initial_params(const ScenarioConfig& c) {
  ParamStore p = ParamStore::defaults();
  const LedgerSection& l = c.ledger;
  p.set_unchecked(ParamKey::Epsilon, param_to_stored(ParamKey::Epsilon, l.epsilon_oz));
  p.set_unchecked(ParamKey::BreakerSwingThreshold,
                  param_to_stored(ParamKey::BreakerSwingThreshold, l.breaker_swing_threshold));
  p.set_unchecked(ParamKey::BreakerWindow, l.breaker_window_ms);
  p.set_unchecked(ParamKey::BreakerCooldown, l.breaker_cooldown_ms);
  p.set_unchecked(ParamKey::FeeRate, param_to_stored(ParamKey::FeeRate, l.fee_rate));
  p.set_unchecked(ParamKey::DivergenceThreshold,
                  param_to_stored(ParamKey::DivergenceThreshold, l.divergence_threshold));
  return p;
}

}  // namespace

Simulation::Impl::Impl(ScenarioConfig c, SimulationOptions o)
    : config(std::move(c)),
      options(o),
      log(o.retain_log),
      ledger(scheduler, log, ledger_config(config), BoundsRegistry::defaults(), initial_params(config)),
      oracle(config.price_process, config.seed),
      vault(TokenAmount::from_oz(config.vault.initial_oz)),
      settlement(ledger, log),
      risk(config.risk, ledger, oracle, log),
      issuance(config.agents, scheduler, ledger, vault, risk, log, config.seed),
      compliance(config.compliance.config),
      orchestrator(config.agents, scheduler, ledger, book, settlement, issuance, compliance, risk, log, config.seed,
                   config.log_level),
      mm(config.market_maker, book, ledger, settlement, oracle, log),
      user_rng(config.seed, "users"),
      mm_cash_left(config.market_maker_cash_usd) {
  log.set_sink(options.event_sink);
}

void Simulation::Impl::setup() {
  log.append(SimTime{0}, "harness", "run_start",
             {{"config", to_json(config)}, {"seed", config.seed}, {"version", kVersion}});

  for (const FaultSpec& f : config.fault_schedule) {
    if (f.target == "oracle") {
      oracle.inject_fault(f.feed, f.kind == "stuck" ? FaultKind::Stuck : FaultKind::Spoofed, f.magnitude,
                          SimTime{f.start_ms}, f.duration_ms);
    } else {
      vault.inject_misreport(f.magnitude, SimTime{f.start_ms}, f.duration_ms);
    }
  }

  book.set_halt_check([this] { return ledger.state().trading_paused(); });
  book.set_onboard_check([this](const Address& a) { return a == accounts::kMarketMaker || orchestrator.onboarded(a); });
  book.on_trade([this](const Trade&) {
    ++s.trades;
    if (ledger.state().trading_paused()) ++s.trades_during_halt;
  });

  mm.set_mint_requester([this](TokenAmount amount, std::function<void(bool)> done) {
    double cost = 0.0;
    if (config.market_maker_cash_usd > 0) {
      const auto ref = oracle.consumer_price();
      cost = amount.oz() * (ref ? ref->price.usd() : oracle.true_price());
      if (cost > mm_cash_left) {
        done(false);
        return;
      }
      mm_cash_left -= cost;
    }
    issuance.issue(accounts::kMarketMaker, amount, [this, cost, done](const IssuanceResult& r) {
      const bool ok = r.outcome == WorkflowOutcome::Completed;
      if (!ok) mm_cash_left += cost;
      done(ok);
    });
  });

  risk.on_agent_update([this](const AgentUpdate& u) {
    if (u.agent == "mm") mm.apply_update(u.version);
    if (u.agent == "issuance") issuance.version = u.version;
  });

  ledger.on_block_executed([this](const Block& b) { on_block(b); });

  genesis();
  register_users();
  schedule_processes();
  schedule_workload();
}

void Simulation::Impl::genesis() {
  auto credit = [this](const Address& a, double oz) {
    if (oz > 0) ledger.genesis_credit(a, TokenAmount::from_oz(oz));
  };
  credit(accounts::kMarketMaker, config.genesis.mm_oz);
  credit(accounts::kColdStorage, config.genesis.cold_oz);
  for (const auto& [who, oz] : config.genesis.accounts) credit(who, oz);

  if (config.users.onboarding == "screen") {
    RngStream rng(config.seed, "profiles");
    for (const UserProfile& p : generate_profiles(config.compliance.corpus, rng, config.compliance.config)) {
      users.push_back(p.id);
      orchestrator.register_user(p, false);
    }
  } else {
    char buf[32];
    for (std::size_t i = 0; i < config.users.count; ++i) {
      std::snprintf(buf, sizeof buf, "user:%05zu", i);
      users.emplace_back(buf);
      orchestrator.register_user(clean_profile(users.back()), true);
    }
  }
  for (const Address& u : users) credit(u, config.users.initial_oz);

  ledger.genesis_reserve(TokenAmount::from_oz(config.vault.initial_oz));
  vault.assign_backing(ledger.state().total_supply);
}

void Simulation::Impl::register_users() {
  for (const auto& [who, oz] : config.genesis.accounts) {
    if (!is_system_account(who)) orchestrator.register_user(clean_profile(who), true);
  }
  for (const ScriptedAction& a : config.scripted_actions) {
    if (!is_system_account(a.user) && orchestrator.status(a.user) == OnboardingStatus::Unknown &&
        a.kind != WorkflowKind::Onboard) {
      orchestrator.register_user(clean_profile(a.user), true);
    }
  }
}

void Simulation::Impl::every(Millis first, Millis period, int prio, std::string_view kind,
                             std::function<void(SimTime)> f) {
  if (first > config.duration_ms) return;
  periodic.push_back(Periodic{period, prio, kind, std::move(f)});
  const std::size_t i = periodic.size() - 1;
  scheduler.schedule(SimTime{first}, prio, kind, [this, i] { fire_periodic(i); });
}

void Simulation::Impl::fire_periodic(std::size_t i) {
  const SimTime now = scheduler.now();
  periodic[i].f(now);
  const SimTime next = now + periodic[i].period;
  if (next.ms <= config.duration_ms) {
    scheduler.schedule(next, periodic[i].prio, periodic[i].kind, [this, i] { fire_periodic(i); });
  }
}

void Simulation::Impl::schedule_processes() {
  const Millis interval = config.block_interval_ms;
  // Registered before settlement so an attestation lands in the same block.
  every(config.vault.attestation_interval_ms, config.vault.attestation_interval_ms, priority::kRisk, "attestation",
        [this](SimTime now) { attest(now); });
  every(interval, interval, priority::kRisk, "settlement_batch", [this](SimTime now) { settlement.settle_batch(now); });
  ledger.start(SimTime{0});
  every(config.risk.phase, config.risk.cycle, priority::kRisk, "risk_cycle", [this](SimTime now) { risk.cycle(now); });
  every(500, 1000, priority::kAgent, "market_tick", [this](SimTime now) {
    for (const PriceSample& p : oracle.publish(now)) {
      ledger.submit_tx(Tx{accounts::kOracle, PostPriceTx{p}, now});
    }
    if (config.market_maker_enabled) mm.quote_cycle(now);
  });
  every(500, 1000, priority::kMetrics, "metrics_sample", [this](SimTime now) { sample(now); });
}

void Simulation::Impl::schedule_workload() {
  const UsersConfig& u = config.users;
  if (u.onboarding == "screen") {
    RngStream rng(config.seed, "onboarding");
    for (const Address& id : users) {
      const auto at = static_cast<Millis>(std::floor(rng.uniform(0.0, static_cast<double>(u.onboarding_window_ms))));
      scheduler.schedule(SimTime{at}, priority::kAgent, "onboard_request", [this, id] {
        orchestrator.handle(UserAction{WorkflowKind::Onboard, id, {}}, [this, id](const WorkflowRecord& r) {
          record(r);
          if (r.outcome == WorkflowOutcome::Completed) start_user_loop(id);
        });
      });
    }
  } else {
    for (const Address& id : users) start_user_loop(id);
  }

  s.scripted.resize(config.scripted_actions.size());
  for (std::size_t i = 0; i < config.scripted_actions.size(); ++i) {
    const ScriptedAction& a = config.scripted_actions[i];
    s.scripted[i] = ScriptedResult{a.t_ms, std::string(to_string(a.kind)), a.user, "Pending", 0, {}};
    scheduler.schedule(SimTime{a.t_ms}, priority::kAgent, "scripted_action", [this, i] {
      const ScriptedAction& a = config.scripted_actions[i];
      orchestrator.handle(UserAction{a.kind, a.user, TokenAmount::from_oz(a.amount_oz)},
                          [this, i](const WorkflowRecord& r) {
                            record(r);
                            ScriptedResult& out = s.scripted[i];
                            out.outcome = std::string(to_string(r.outcome));
                            out.latency_ms = r.latency();
                            out.detail = r.detail;
                          });
    });
  }

  std::vector<Address> burst_users = users;
  if (burst_users.empty()) {
    for (const auto& [who, oz] : config.genesis.accounts) {
      if (!is_system_account(who)) burst_users.push_back(who);
    }
  }
  RngStream burst_rng(config.seed, "bursts");
  std::size_t rr = 0;
  for (const Burst& b : config.bursts) {
    if (burst_users.empty()) break;
    std::vector<Millis> times;
    for (std::size_t i = 0; i < b.count; ++i) {
      times.push_back(b.start_ms +
                      static_cast<Millis>(std::floor(burst_rng.uniform(0.0, static_cast<double>(b.duration_ms)))));
    }
    std::sort(times.begin(), times.end());
    for (Millis t : times) {
      const Address user = burst_users[rr++ % burst_users.size()];
      const UserAction action{b.kind, user, TokenAmount::from_oz(b.amount_oz)};
      scheduler.schedule(SimTime{t}, priority::kAgent, "burst_action", [this, action] {
        orchestrator.handle(action, [this](const WorkflowRecord& r) { record(r); });
      });
    }
  }

  s.governance.resize(config.governance_schedule.size());
  for (std::size_t i = 0; i < config.governance_schedule.size(); ++i) {
    scheduler.schedule(SimTime{config.governance_schedule[i].t_ms}, priority::kAgent, "governance_step",
                       [this, i] { governance_step(i); });
  }
}

void Simulation::Impl::start_user_loop(const Address& user) {
  if (config.users.think_time_mean_ms <= 0) return;
  next_user_action(user);
}

void Simulation::Impl::next_user_action(const Address& user) {
  const auto think = static_cast<Millis>(std::llround(user_rng.exponential(config.users.think_time_mean_ms)));
  if ((scheduler.now() + think).ms > config.duration_ms) return;
  scheduler.schedule_in(think, priority::kAgent, "user_action", [this, user] {
    orchestrator.handle(draw_action(user), [this, user](const WorkflowRecord& r) {
      record(r);
      next_user_action(user);
    });
  });
}

UserAction Simulation::Impl::draw_action(const Address& user) {
  const ActionMix& m = config.users.action_mix;
  const double x = user_rng.uniform();
  WorkflowKind kind = WorkflowKind::Redeem;
  if (x < m.buy) {
    kind = WorkflowKind::Buy;
  } else if (x < m.buy + m.sell) {
    kind = WorkflowKind::Sell;
  } else if (x < m.buy + m.sell + m.issue) {
    kind = WorkflowKind::Issue;
  }
  const double oz = std::min(config.users.size_max_oz,
                             user_rng.lognormal(std::log(config.users.size_median_oz), config.users.size_sigma));
  TokenAmount amount = TokenAmount::from_oz(oz);
  if (amount.micro < 1) amount.micro = 1;
  return UserAction{kind, user, amount};
}

void Simulation::Impl::record(const WorkflowRecord& r) {
  ++s.outcomes[std::string(to_string(r.kind))][std::string(to_string(r.outcome))];
  if (r.outcome != WorkflowOutcome::Completed || r.started.ms < config.warmup_ms) return;
  const auto latency = static_cast<double>(r.latency());
  latencies[std::string(to_string(r.kind))].push_back(latency);
  if (r.kind != WorkflowKind::Onboard) latencies["all"].push_back(latency);
  if (r.kind == WorkflowKind::Issue && r.agent_ms && r.chain_ms) {
    agent_ms_sum += static_cast<double>(*r.agent_ms);
    chain_ms_sum += static_cast<double>(*r.chain_ms);
    ++issue_samples;
  }
}

void Simulation::Impl::on_block(const Block& b) {
  const LedgerState& st = ledger.state();
  const auto second = static_cast<std::size_t>(b.timestamp.ms / 1000);
  if (second >= s.tps_series.size()) s.tps_series.resize(second + 1, 0.0);
  bool minted = false;
  for (const Receipt& r : b.receipts) {
    if (r.accepted && counts_toward_tps(r.kind)) s.tps_series[second] += 1.0;
    if (r.accepted && r.kind == TxKind::Mint) minted = true;
  }
  if (minted && risk.issuance_frozen()) ++s.mints_while_frozen;

  if (st.trading_paused() && !halt_open) {
    s.halts.push_back(HaltInterval{b.timestamp.ms, std::nullopt});
    halt_open = true;
  } else if (!st.trading_paused() && halt_open) {
    s.halts.back().end_ms = b.timestamp.ms;
    halt_open = false;
  }
  if (st.reference_feed != last_reference) {
    last_reference = st.reference_feed;
    ++s.reference_switches;
    if (!s.first_switch_ms) s.first_switch_ms = b.timestamp.ms;
  }

  std::int64_t sum = 0;
  for (const auto& [who, bal] : st.balances) sum += bal.micro;
  if (sum != st.total_supply.micro) ++s.balance_sum_violations;
}

void Simulation::Impl::attest(SimTime now) {
  const Attestation a = vault.issue_attestation(now);
  log.append(now, "vault", "attestation",
             {{"reported", a.reported_oz.micro}, {"held", vault.total().micro}, {"auditor", a.auditor}});
  ledger.submit_tx(Tx{a.auditor, SetReserveTx{a.reported_oz}, now});
  if (vault.allocated() != ledger.state().total_supply) ++s.backing_violations;
}

void Simulation::Impl::governance_step(std::size_t index) {
  const GovernanceStep& g = config.governance_schedule[index];
  GovernanceAction action = gov::Unpause{};
  if (g.action == "propose") {
    const ParamKey key = *param_from_string(g.param);
    action = gov::ProposeParam{key, param_to_stored(key, g.value)};
  } else if (g.action == "vote") {
    action = gov::CastVote{g.proposal, g.support};
  } else if (g.action == "execute") {
    action = gov::ExecuteParam{g.proposal};
  } else if (g.action == "propose_update") {
    action = gov::ProposeUpdate{AgentUpdate{g.agent, g.version}};
  } else if (g.action == "sign") {
    action = gov::SignUpdate{g.proposal};
  } else if (g.action == "clear_freeze") {
    action = gov::ClearFreeze{};
  }
  s.governance[index] = GovernanceResult{g.t_ms, g.action, g.by, false, "pending", 0, 0};
  const std::size_t slot = index;
  ledger.submit_tx(Tx{g.by, GovernanceTx{std::move(action)}, scheduler.now()}, [this, slot](const Receipt& r) {
    GovernanceResult& out = s.governance[slot];
    out.accepted = r.accepted;
    out.reason = r.reason;
    out.ref = r.ref;
    out.confirmed_ms = scheduler.now().ms;
  });
}

void Simulation::Impl::sample(SimTime now) {
  Sample x;
  x.t_ms = now.ms;
  const auto bid = book.best_bid();
  const auto ask = book.best_ask();
  if (bid && ask) {
    const double mid_micro = (static_cast<double>(bid->micro_usd) + static_cast<double>(ask->micro_usd)) / 2.0;
    x.mid = mid_micro / Price::kMicroPerUsd;
    x.spread_frac = static_cast<double>(ask->micro_usd - bid->micro_usd) / mid_micro;
    const Depth d = book.depth_within(0.01);
    x.bid_depth_oz = d.bid.oz();
    x.ask_depth_oz = d.ask.oz();
  }
  x.mm_inventory_oz = mm.inventory_oz();
  const auto second = static_cast<std::size_t>(now.ms / 1000);
  x.tps = second < s.tps_series.size() ? s.tps_series[second] : 0.0;
  x.risk_util = risk.utilization();
  if (const auto ref = oracle.consumer_price()) x.ref_price = ref->price.usd();
  x.half_spread = mm.current_half_spread();
  x.regime = oracle.process().regime_at(now).name;
  x.halted = ledger.state().trading_paused();
  x.quoting = mm.quoting();
  s.samples.push_back(std::move(x));
}

MetricsSummary Simulation::Impl::finish() {
  s.scenario = config.name;
  s.seed = config.seed;
  s.duration_ms = config.duration_ms;
  s.warmup_ms = config.warmup_ms;
  s.users = users.size();

  const auto seconds = static_cast<std::size_t>(config.duration_ms / 1000);
  s.tps_series.resize(seconds, 0.0);
  const auto first = static_cast<std::size_t>(config.warmup_ms / 1000);
  double total = 0.0;
  for (std::size_t i = 0; i < seconds; ++i) {
    s.tps_peak = std::max(s.tps_peak, s.tps_series[i]);
    if (i >= first) total += s.tps_series[i];
  }
  if (seconds > first) s.tps_sustained = total / static_cast<double>(seconds - first);

  for (const auto& [kind, values] : latencies) s.latency[kind] = latency_stats(values);
  if (issue_samples > 0) {
    s.issuance_mean_agent_ms = agent_ms_sum / static_cast<double>(issue_samples);
    s.issuance_mean_chain_ms = chain_ms_sum / static_cast<double>(issue_samples);
  }

  for (const RiskAlert& a : risk.alerts()) {
    AlertRecord r;
    r.kind = std::string(to_string(a.kind));
    r.subject = a.subject;
    r.detected_ms = a.raised_at.ms;
    r.action = a.action_taken;
    if (a.cleared_at) r.cleared_ms = a.cleared_at->ms;
    const bool oracle_kind = a.kind == AlertKind::OracleStale || a.kind == AlertKind::OracleDiverged;
    const bool vault_kind = a.kind == AlertKind::ReserveShortfall;
    for (const FaultSpec& f : config.fault_schedule) {
      if (f.start_ms > a.raised_at.ms) continue;
      if (oracle_kind && f.target == "oracle") r.onset_ms = f.start_ms;
      if (vault_kind && f.target == "vault") {
        // A misreport is only observable once an attestation carries it.
        r.onset_ms = f.start_ms;
        for (const Attestation& att : vault.attestations()) {
          if (att.t.ms >= f.start_ms) {
            r.onset_ms = att.t.ms;
            break;
          }
        }
      }
    }
    if (r.onset_ms) r.latency_ms = r.detected_ms - *r.onset_ms;
    s.alerts.push_back(std::move(r));
  }

  s.rebalances = mm.rebalances();

  double auto_sum = 0.0;
  std::size_t auto_n = 0;
  for (const ComplianceRecord& c : orchestrator.compliance_records()) {
    ++s.compliance_counts[std::string(to_string(c.decision.outcome))];
    if (c.decision.outcome == ComplianceOutcome::Approved) {
      auto_sum += static_cast<double>(c.decision.processing_time);
      ++auto_n;
    }
    if (c.decision.review_resolved_at) {
      s.compliance_max_review_ms =
          std::max(s.compliance_max_review_ms, *c.decision.review_resolved_at - c.decision.decided_at);
    }
  }
  if (auto_n > 0) s.compliance_mean_auto_approval_ms = auto_sum / static_cast<double>(auto_n);

  double util = 0.0;
  std::size_t util_n = 0;
  for (const Sample& x : s.samples) {
    if (x.t_ms < config.warmup_ms) continue;
    util += x.risk_util;
    ++util_n;
  }
  if (util_n > 0) s.risk_mean_util = util / static_cast<double>(util_n);
  s.risk_peak_util = risk.peak_utilization();

  for (const auto& [key, value] : ledger.state().params.values()) {
    s.final_params[std::string(to_string(key))] = param_from_stored(key, value);
  }

  s.digest = log.digest_hex();
  s.events = log.size();
  log.append(SimTime{config.duration_ms}, "harness", "run_end", {{"digest", s.digest}, {"events", s.events}});
  return std::move(s);
}

Simulation::Simulation(ScenarioConfig config, SimulationOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), options)) {
  impl_->setup();
}

Simulation::~Simulation() = default;

MetricsSummary Simulation::run() {
  if (impl_->ran) throw std::logic_error("Simulation::run may only be called once");
  impl_->ran = true;
  impl_->scheduler.run_until(SimTime{impl_->config.duration_ms});
  return impl_->finish();
}

const ScenarioConfig& Simulation::config() const { return impl_->config; }
Scheduler& Simulation::scheduler() { return impl_->scheduler; }
EventLog& Simulation::log() { return impl_->log; }
Ledger& Simulation::ledger() { return impl_->ledger; }
Oracle& Simulation::oracle() { return impl_->oracle; }
Vault& Simulation::vault() { return impl_->vault; }
OrderBook& Simulation::book() { return impl_->book; }
Settlement& Simulation::settlement() { return impl_->settlement; }
RiskAgent& Simulation::risk() { return impl_->risk; }
MarketMaker& Simulation::market_maker() { return impl_->mm; }
IssuanceAgent& Simulation::issuance() { return impl_->issuance; }
Orchestrator& Simulation::orchestrator() { return impl_->orchestrator; }

MetricsSummary run_scenario(const ScenarioConfig& config) {
  Simulation sim(config, SimulationOptions{nullptr, false});
  return sim.run();
}

// --- summary views ---

std::map<std::string, double> MetricsSummary::metrics() const {
  std::map<std::string, double> m;
  m["tps.sustained"] = tps_sustained;
  m["tps.peak"] = tps_peak;
  for (const auto& [kind, l] : latency) {
    const std::string k = "latency." + kind + ".";
    m[k + "count"] = static_cast<double>(l.count);
    m[k + "mean_ms"] = l.mean_ms;
    m[k + "p50_ms"] = l.p50_ms;
    m[k + "p95_ms"] = l.p95_ms;
    m[k + "p99_ms"] = l.p99_ms;
  }
  std::size_t workflows = 0;
  for (const auto& [kind, by_outcome] : outcomes) {
    for (const auto& [outcome, n] : by_outcome) {
      m["outcome." + kind + "." + outcome] = static_cast<double>(n);
      workflows += n;
    }
  }
  m["workflows.total"] = static_cast<double>(workflows);
  m["issuance.mean_agent_ms"] = issuance_mean_agent_ms;
  m["issuance.mean_chain_ms"] = issuance_mean_chain_ms;

  // Market quality over post-warmup samples where both sides are quoted.
  std::map<std::string, std::pair<std::size_t, std::size_t>> band;  // regime -> (samples, in band)
  std::map<std::string, double> regime_max;
  double max_spread = 0.0;
  std::size_t quoted = 0;
  std::size_t peg_violations = 0;
  std::size_t ceiling_breaches = 0;
  std::optional<double> min_bid;
  std::optional<double> min_ask;
  double max_inv = 0.0;
  for (const Sample& x : samples) {
    max_inv = std::max(max_inv, std::abs(x.mm_inventory_oz));
    if (x.t_ms < warmup_ms || !x.spread_frac) continue;
    ++quoted;
    const double sp = *x.spread_frac;
    const double tick = tick_fraction(*x.mid);
    auto& [n, in] = band[x.regime];
    ++n;
    if (sp >= kBandLow - 2 * tick && sp <= kBandHigh + 2 * tick) ++in;
    if (sp > kSpreadCeiling + 2 * tick) ++ceiling_breaches;
    regime_max[x.regime] = std::max(regime_max[x.regime], sp);
    max_spread = std::max(max_spread, sp);
    min_bid = std::min(min_bid.value_or(*x.bid_depth_oz), *x.bid_depth_oz);
    min_ask = std::min(min_ask.value_or(*x.ask_depth_oz), *x.ask_depth_oz);
    if (!x.halted && x.ref_price && *x.mid > 0) {
      const double dev = std::abs(*x.mid - *x.ref_price) / *x.ref_price;
      if (dev > x.half_spread + tick) ++peg_violations;
    }
  }
  m["market.quoted_samples"] = static_cast<double>(quoted);
  m["market.max_spread"] = max_spread;
  m["market.peg_violations"] = static_cast<double>(peg_violations);
  m["market.spread_ceiling_breaches"] = static_cast<double>(ceiling_breaches);
  if (min_bid) m["market.min_bid_depth_oz"] = *min_bid;
  if (min_ask) m["market.min_ask_depth_oz"] = *min_ask;
  for (const auto& [regime, counts] : band) {
    m["market.regime." + regime + ".samples"] = static_cast<double>(counts.first);
    m["market.regime." + regime + ".in_band_fraction"] =
        static_cast<double>(counts.second) / static_cast<double>(counts.first);
    m["market.regime." + regime + ".max_spread"] = regime_max[regime];
  }
  m["inventory.max_abs_oz"] = max_inv;
  m["inventory.rebalances"] = static_cast<double>(rebalances.size());
  if (!rebalances.empty()) {
    double lo = std::abs(rebalances.front().inventory_oz);
    for (const RebalanceEvent& r : rebalances) lo = std::min(lo, std::abs(r.inventory_oz));
    m["inventory.min_rebalance_trigger_oz"] = lo;
  }

  m["trades.total"] = static_cast<double>(trades);
  m["halts.count"] = static_cast<double>(halts.size());
  m["halts.trades_during"] = static_cast<double>(trades_during_halt);
  std::size_t open = 0;
  for (const HaltInterval& h : halts) open += h.end_ms ? 0 : 1;
  m["halts.unresolved"] = static_cast<double>(open);
  if (!halts.empty()) {
    const HaltInterval& h = halts.front();
    m["halts.first_start_ms"] = static_cast<double>(h.start_ms);
    if (h.end_ms) {
      m["halts.first_duration_ms"] = static_cast<double>(*h.end_ms - h.start_ms);
      bool resumed = false;
      for (const Sample& x : samples) resumed = resumed || (x.t_ms >= *h.end_ms && x.quoting);
      m["halts.first_resumed_quoting"] = resumed ? 1.0 : 0.0;
    }
  }
  m["oracle.reference_switches"] = static_cast<double>(reference_switches);
  if (first_switch_ms) m["oracle.first_switch_ms"] = static_cast<double>(*first_switch_ms);

  for (const char* kind : {"OracleStale", "OracleDiverged", "ReserveShortfall", "Concentration",
                           "GovernanceOutOfBounds"}) {
    m[std::string("alerts.") + kind + ".count"] = 0.0;
  }
  for (const AlertRecord& a : alerts) {
    const std::string k = "alerts." + a.kind + ".";
    if (m[k + "count"] == 0.0) {
      m[k + "first_detected_ms"] = static_cast<double>(a.detected_ms);
      if (a.latency_ms) m[k + "first_latency_ms"] = static_cast<double>(*a.latency_ms);
    }
    m[k + "count"] += 1.0;
  }

  for (const auto& [o, key] : {std::pair{"approved", "Approved"}, {"manual_review", "ManualReview"}, {"denied", "Denied"}}) {
    auto it = compliance_counts.find(o);
    m[std::string("compliance.") + key] = it == compliance_counts.end() ? 0.0 : static_cast<double>(it->second);
  }
  m["compliance.mean_auto_approval_ms"] = compliance_mean_auto_approval_ms;
  m["compliance.max_review_ms"] = static_cast<double>(compliance_max_review_ms);

  m["risk.mean_util"] = risk_mean_util;
  m["risk.peak_util"] = risk_peak_util;
  m["reserve.balance_sum_violations"] = static_cast<double>(balance_sum_violations);
  m["reserve.backing_violations"] = static_cast<double>(backing_violations);
  m["reserve.mints_while_frozen"] = static_cast<double>(mints_while_frozen);

  for (std::size_t i = 0; i < governance.size(); ++i) {
    m["governance." + std::to_string(i) + ".accepted"] = governance[i].accepted ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < scripted.size(); ++i) {
    m["scripted." + std::to_string(i) + ".completed"] = scripted[i].outcome == "Completed" ? 1.0 : 0.0;
  }
  for (const auto& [name, value] : final_params) m["param." + name] = value;
  m["events"] = static_cast<double>(events);
  return m;
}

namespace {

ordered_json opt(const std::optional<Millis>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json to_json(const MetricsSummary& s) {
  ordered_json j;
  j["scenario"] = s.scenario;
  j["seed"] = s.seed;
  j["version"] = kVersion;
  j["duration_ms"] = s.duration_ms;
  j["warmup_ms"] = s.warmup_ms;
  j["users"] = s.users;
  j["digest"] = s.digest;
  j["events"] = s.events;
  j["tps_definition"] = kTpsDefinition;
  j["tps"] = {{"sustained", s.tps_sustained}, {"peak", s.tps_peak}};
  ordered_json lat = ordered_json::object();
  for (const auto& [kind, l] : s.latency) {
    lat[kind] = {{"count", l.count}, {"mean_ms", l.mean_ms}, {"p50_ms", l.p50_ms}, {"p95_ms", l.p95_ms},
                 {"p99_ms", l.p99_ms}};
  }
  j["latency"] = lat;
  j["outcomes"] = s.outcomes;
  j["issuance"] = {{"mean_agent_ms", s.issuance_mean_agent_ms}, {"mean_chain_ms", s.issuance_mean_chain_ms}};
  ordered_json alerts = ordered_json::array();
  for (const AlertRecord& a : s.alerts) {
    alerts.push_back({{"kind", a.kind},
                      {"subject", a.subject},
                      {"onset_ms", opt(a.onset_ms)},
                      {"detected_ms", a.detected_ms},
                      {"latency_ms", opt(a.latency_ms)},
                      {"action", a.action},
                      {"cleared_ms", opt(a.cleared_ms)}});
  }
  j["alerts"] = alerts;
  ordered_json halts = ordered_json::array();
  for (const HaltInterval& h : s.halts) halts.push_back({{"start_ms", h.start_ms}, {"end_ms", opt(h.end_ms)}});
  j["halts"] = halts;
  ordered_json rebalances = ordered_json::array();
  for (const RebalanceEvent& r : s.rebalances) {
    rebalances.push_back(
        {{"t_ms", r.t.ms}, {"inventory_oz", r.inventory_oz}, {"amount_oz", r.amount.oz()}, {"source", r.source}});
  }
  j["rebalances"] = rebalances;
  j["compliance"] = {{"counts", s.compliance_counts},
                     {"mean_auto_approval_ms", s.compliance_mean_auto_approval_ms},
                     {"max_review_ms", s.compliance_max_review_ms}};
  ordered_json gov = ordered_json::array();
  for (const GovernanceResult& g : s.governance) {
    gov.push_back({{"t_ms", g.t_ms},
                   {"action", g.action},
                   {"by", g.by},
                   {"accepted", g.accepted},
                   {"reason", g.reason},
                   {"ref", g.ref},
                   {"confirmed_ms", g.confirmed_ms}});
  }
  j["governance"] = gov;
  ordered_json scripted = ordered_json::array();
  for (const ScriptedResult& r : s.scripted) {
    scripted.push_back({{"t_ms", r.t_ms},
                        {"action", r.action},
                        {"user", r.user},
                        {"outcome", r.outcome},
                        {"latency_ms", r.latency_ms},
                        {"detail", r.detail}});
  }
  j["scripted"] = scripted;
  j["final_params"] = s.final_params;
  ordered_json metrics = ordered_json::object();
  for (const auto& [k, v] : s.metrics()) metrics[k] = v;
  j["metrics"] = metrics;
  return j;
}

std::vector<ExpectationResult> check_expectations(const ScenarioConfig& config, const MetricsSummary& summary) {
  const auto m = summary.metrics();
  std::vector<ExpectationResult> out;
  for (const auto& [key, range] : config.expect) {
    ExpectationResult r{key, std::nullopt, range.first, range.second, false};
    if (auto it = m.find(key); it != m.end()) {
      r.value = it->second;
      r.pass = it->second >= range.first && it->second <= range.second;
    }
    out.push_back(r);
  }
  return out;
}

namespace {

void write_opt(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

void write_metrics_csv(const MetricsSummary& s, std::ostream& out) {
  out << "t_ms,mid,spread_frac,bid_depth_oz,ask_depth_oz,mm_inventory_oz,tps,risk_util\n";
  out.precision(10);
  for (const Sample& x : s.samples) {
    out << x.t_ms << ',';
    write_opt(out, x.mid);
    out << ',';
    write_opt(out, x.spread_frac);
    out << ',';
    write_opt(out, x.bid_depth_oz);
    out << ',';
    write_opt(out, x.ask_depth_oz);
    out << ',' << x.mm_inventory_oz << ',' << x.tps << ',' << x.risk_util << '\n';
  }
}

void write_alerts_csv(const MetricsSummary& s, std::ostream& out) {
  out << "kind,onset_ms,detected_ms,latency_ms,action\n";
  for (const AlertRecord& a : s.alerts) {
    out << a.kind << ',';
    if (a.onset_ms) out << *a.onset_ms;
    out << ',' << a.detected_ms << ',';
    if (a.latency_ms) out << *a.latency_ms;
    out << ",\"" << a.action << "\"\n";
  }
}

void write_outputs(const MetricsSummary& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  std::ofstream metrics(root / "metrics.csv");
  write_metrics_csv(s, metrics);
  std::ofstream alerts(root / "alerts.csv");
  write_alerts_csv(s, alerts);
  std::ofstream summary(root / "summary.json");
  summary << to_json(s).dump(2) << '\n';
}

}  // namespace goldsim
