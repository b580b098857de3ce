#include "goldsim/workflows.hpp"

#include <algorithm>
#include <cmath>

namespace goldsim {

std::string_view to_string(WorkflowKind k) {
  switch (k) {
    case WorkflowKind::Onboard: return "onboard";
    case WorkflowKind::Buy: return "buy";
    case WorkflowKind::Sell: return "sell";
    case WorkflowKind::Issue: return "issue";
    case WorkflowKind::Redeem: return "redeem";
  }
  return "unknown";
}

std::optional<WorkflowKind> workflow_from_string(std::string_view s) {
  for (auto k : {WorkflowKind::Onboard, WorkflowKind::Buy, WorkflowKind::Sell, WorkflowKind::Issue,
                 WorkflowKind::Redeem}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(WorkflowOutcome o) {
  switch (o) {
    case WorkflowOutcome::Completed: return "Completed";
    case WorkflowOutcome::IssuanceFrozen: return "IssuanceFrozen";
    case WorkflowOutcome::InsufficientReserveHeadroom: return "InsufficientReserveHeadroom";
    case WorkflowOutcome::ComplianceBlocked: return "ComplianceBlocked";
    case WorkflowOutcome::NotOnboarded: return "NotOnboarded";
    case WorkflowOutcome::InsufficientBalance: return "InsufficientBalance";
    case WorkflowOutcome::TradingHalted: return "TradingHalted";
    case WorkflowOutcome::NoLiquidity: return "NoLiquidity";
    case WorkflowOutcome::MintReverted: return "MintReverted";
    case WorkflowOutcome::BurnReverted: return "BurnReverted";
    case WorkflowOutcome::SettlementFailed: return "SettlementFailed";
  }
  return "Unknown";
}

namespace {

Millis truncated_normal_ms(RngStream& rng, double mean, double sd, double floor) {
  return static_cast<Millis>(std::llround(std::max(floor, rng.normal(mean, sd))));
}

}  // namespace

// --- issuance agent ---

IssuanceAgent::IssuanceAgent(AgentTimingConfig timing, Scheduler& scheduler, Ledger& ledger, Vault& vault,
                             RiskAgent& risk, EventLog& log, std::uint64_t seed, Address self)
    : timing_(timing),
      scheduler_(scheduler),
      ledger_(ledger),
      vault_(vault),
      risk_(risk),
      log_(log),
      self_(std::move(self)),
      rng_(seed, "issuance_agent") {
  ledger_.on_block_committed([this](const Block&) { flush_retries(); });
}

Millis IssuanceAgent::processing_delay() {
  return truncated_normal_ms(rng_, timing_.processing_mean_ms, timing_.processing_sd_ms, timing_.processing_min_ms);
}

void IssuanceAgent::flush_retries() {
  if (retry_.empty() || ledger_.state().trading_paused()) return;
  std::vector<std::function<void()>> again;
  again.swap(retry_);
  for (auto& f : again) {
    ++resubmissions_;
    f();
  }
}

void IssuanceAgent::issue(const Address& recipient, TokenAmount amount, Done done) {
  ++in_flight_;
  auto result = std::make_shared<IssuanceResult>();
  scheduler_.schedule_in(processing_delay(), priority::kAgent, "issuance_process",
                         [this, recipient, amount, result, done = std::move(done)]() mutable {
    const SimTime now = scheduler_.now();
    auto fail = [&](WorkflowOutcome o, std::string reason) {
      --in_flight_;
      result->outcome = o;
      result->reason = std::move(reason);
      result->submitted_at = result->confirmed_at = now;
      if (done) done(*result);
    };
    const LedgerState& s = ledger_.state();
    if (risk_.issuance_frozen() || s.issuance_paused()) {
      fail(WorkflowOutcome::IssuanceFrozen, "issuance frozen");
      return;
    }
    if (amount.micro <= 0 ||
        s.total_supply + pending_mints_ + amount > s.attested_reserve + s.epsilon() ||
        vault_.available() < amount) {
      fail(WorkflowOutcome::InsufficientReserveHeadroom, "insufficient reserve headroom");
      return;
    }
    LockTicket ticket = vault_.lock_for_issuance(amount);
    pending_mints_ += amount;
    result->submitted_at = now;
    submit_mint(recipient, amount, ticket, "bars-" + std::to_string(++batches_), result, std::move(done));
  });
}

void IssuanceAgent::submit_mint(const Address& recipient, TokenAmount amount, LockTicket ticket, std::string batch,
                                std::shared_ptr<IssuanceResult> result, Done done) {
  ledger_.submit_tx(Tx{self_, MintTx{recipient, amount, batch}, {}},
                    [this, recipient, amount, ticket, batch, result, done](const Receipt& r) mutable {
    if (!r.accepted && r.reason == revert::kTradingHalted) {
      retry_.push_back([this, recipient, amount, ticket, batch, result, done]() mutable {
        submit_mint(recipient, amount, ticket, batch, result, std::move(done));
      });
      return;
    }
    --in_flight_;
    pending_mints_ -= amount;
    result->confirmed_at = r.block_time + ledger_.config().commit_latency;
    if (r.accepted) {
      vault_.commit_issuance(ticket);
      result->outcome = WorkflowOutcome::Completed;
    } else {
      vault_.release(ticket);
      result->outcome =
          r.reason == revert::kIssuancePaused ? WorkflowOutcome::IssuanceFrozen : WorkflowOutcome::MintReverted;
      result->reason = r.reason;
    }
    if (done) done(*result);
  });
}

void IssuanceAgent::redeem(const Address& owner, TokenAmount amount, Done done) {
  ++in_flight_;
  auto result = std::make_shared<IssuanceResult>();
  scheduler_.schedule_in(processing_delay(), priority::kAgent, "redemption_process",
                         [this, owner, amount, result, done = std::move(done)]() mutable {
    result->submitted_at = scheduler_.now();
    submit_burn(owner, amount, result, std::move(done));
  });
}

void IssuanceAgent::submit_burn(const Address& owner, TokenAmount amount, std::shared_ptr<IssuanceResult> result,
                                Done done) {
  ledger_.submit_tx(Tx{self_, BurnTx{owner, amount}, {}},
                    [this, owner, amount, result, done](const Receipt& r) mutable {
    if (!r.accepted && r.reason == revert::kTradingHalted) {
      retry_.push_back([this, owner, amount, result, done]() mutable {
        submit_burn(owner, amount, result, std::move(done));
      });
      return;
    }
    --in_flight_;
    result->confirmed_at = r.block_time + ledger_.config().commit_latency;
    if (r.accepted) {
      try {
        vault_.withdraw_physical(vault_.lock_for_redemption(amount));
        result->outcome = WorkflowOutcome::Completed;
      } catch (const VaultError& e) {
        // Tokens are already burned; the physical leg is recorded as outstanding.
        log_.append(result->confirmed_at, "issuance", "withdrawal_failed",
                    {{"owner", owner}, {"amount", amount.micro}, {"error", e.what()}});
        result->outcome = WorkflowOutcome::Completed;
        result->reason = e.what();
      }
    } else {
      result->outcome = WorkflowOutcome::BurnReverted;
      result->reason = r.reason;
    }
    if (done) done(*result);
  });
}

// --- orchestrator ---

struct Orchestrator::Workflow {
  WorkflowRecord rec;
  Done done;
};

Orchestrator::Orchestrator(AgentTimingConfig timing, Scheduler& scheduler, Ledger& ledger, OrderBook& book,
                           Settlement& settlement, IssuanceAgent& issuance, const ComplianceAgent& compliance,
                           RiskAgent& risk, EventLog& log, std::uint64_t seed, LogLevel level)
    : timing_(timing),
      scheduler_(scheduler),
      ledger_(ledger),
      book_(book),
      settlement_(settlement),
      issuance_(issuance),
      compliance_agent_(compliance),
      risk_(risk),
      log_(log),
      level_(level),
      routing_rng_(seed, "routing"),
      compliance_rng_(seed, "compliance") {}

void Orchestrator::register_user(const UserProfile& profile, bool preapproved) {
  profiles_[profile.id] = profile;
  status_[profile.id] = preapproved ? OnboardingStatus::Approved : OnboardingStatus::Unknown;
}

OnboardingStatus Orchestrator::status(const Address& user) const {
  auto it = status_.find(user);
  return it == status_.end() ? OnboardingStatus::Unknown : it->second;
}

TokenAmount Orchestrator::available(const Address& user) const {
  TokenAmount a = ledger_.balance_of(user) - settlement_.pending_out(user);
  if (auto it = reserved_.find(user); it != reserved_.end()) a -= it->second;
  return a;
}

Millis Orchestrator::routing_delay() {
  return truncated_normal_ms(routing_rng_, timing_.routing_mean_ms, timing_.routing_sd_ms, timing_.routing_min_ms);
}

std::uint64_t Orchestrator::handle(const UserAction& action, Done done) {
  auto wf = std::make_shared<Workflow>();
  wf->rec.id = next_id_++;
  wf->rec.kind = action.kind;
  wf->rec.user = action.user;
  wf->rec.amount = action.amount;
  wf->rec.started = scheduler_.now();
  wf->done = std::move(done);
  ++active_;
  if (level_ == LogLevel::Full) {
    log_.append(wf->rec.started, "orchestrator", "workflow_start",
                {{"id", wf->rec.id}, {"kind", to_string(wf->rec.kind)}, {"user", wf->rec.user},
                 {"amount", wf->rec.amount.micro}});
  }
  start(wf);
  return wf->rec.id;
}

void Orchestrator::finish(const std::shared_ptr<Workflow>& wf, WorkflowOutcome outcome, std::string detail) {
  wf->rec.finished = std::max(scheduler_.now(), wf->rec.started);
  wf->rec.outcome = outcome;
  wf->rec.detail = std::move(detail);
  --active_;
  if (level_ == LogLevel::Full || outcome != WorkflowOutcome::Completed) {
    nlohmann::ordered_json d{{"id", wf->rec.id},
                             {"kind", to_string(wf->rec.kind)},
                             {"user", wf->rec.user},
                             {"outcome", to_string(outcome)},
                             {"latency_ms", wf->rec.latency()}};
    if (!wf->rec.detail.empty()) d["detail"] = wf->rec.detail;
    if (level_ == LogLevel::Full || wf->rec.kind != WorkflowKind::Sell) {
      log_.append(wf->rec.finished, "orchestrator", "workflow_end", std::move(d));
    }
  }
  if (wf->done) wf->done(wf->rec);
}

void Orchestrator::start(std::shared_ptr<Workflow> wf) {
  const WorkflowKind k = wf->rec.kind;
  if (k == WorkflowKind::Onboard) {
    run_onboard(std::move(wf));
    return;
  }
  const OnboardingStatus st = status(wf->rec.user);
  if (st == OnboardingStatus::Denied) {
    finish(wf, WorkflowOutcome::ComplianceBlocked, "compliance denied");
    return;
  }
  if (st != OnboardingStatus::Approved) {
    finish(wf, WorkflowOutcome::NotOnboarded);
    return;
  }
  switch (k) {
    case WorkflowKind::Buy:
    case WorkflowKind::Sell: run_trade(std::move(wf)); break;
    case WorkflowKind::Issue: run_issue(std::move(wf)); break;
    case WorkflowKind::Redeem: run_redeem(std::move(wf)); break;
    case WorkflowKind::Onboard: break;
  }
}

void Orchestrator::run_onboard(std::shared_ptr<Workflow> wf) {
  auto pit = profiles_.find(wf->rec.user);
  if (pit == profiles_.end()) {
    finish(wf, WorkflowOutcome::ComplianceBlocked, "unknown profile");
    return;
  }
  if (status(wf->rec.user) != OnboardingStatus::Unknown) {
    finish(wf, WorkflowOutcome::ComplianceBlocked, "already screened");
    return;
  }
  status_[wf->rec.user] = OnboardingStatus::Screening;
  const SimTime start = risk_.admit(scheduler_.now());
  const ComplianceDecision d = compliance_agent_.screen(pit->second, start, compliance_rng_);
  compliance_.push_back(ComplianceRecord{wf->rec.user, d, wf->rec.started});
  scheduler_.schedule(d.decided_at, priority::kAgent, "compliance_decision", [this, wf, d] {
    log_.append(d.decided_at, "compliance", "decision",
                {{"user", wf->rec.user}, {"outcome", to_string(d.outcome)},
                 {"processing_ms", d.processing_time}, {"reason", d.reason}});
    switch (d.outcome) {
      case ComplianceOutcome::Approved:
        status_[wf->rec.user] = OnboardingStatus::Approved;
        finish(wf, WorkflowOutcome::Completed, "auto_approved");
        break;
      case ComplianceOutcome::Denied:
        status_[wf->rec.user] = OnboardingStatus::Denied;
        finish(wf, WorkflowOutcome::ComplianceBlocked, d.reason);
        break;
      case ComplianceOutcome::ManualReview:
        status_[wf->rec.user] = OnboardingStatus::InReview;
        scheduler_.schedule(*d.review_resolved_at, priority::kAgent, "manual_review", [this, wf, d] {
          status_[wf->rec.user] = OnboardingStatus::Approved;
          log_.append(*d.review_resolved_at, "compliance", "review_resolved",
                      {{"user", wf->rec.user}, {"outcome", "approved"},
                       {"review_ms", *d.review_resolved_at - d.decided_at}});
          finish(wf, WorkflowOutcome::Completed, "manual_review");
        });
        break;
    }
  });
}

void Orchestrator::run_trade(std::shared_ptr<Workflow> wf) {
  if (wf->rec.amount.micro <= 0) {
    finish(wf, WorkflowOutcome::NoLiquidity, "empty order");
    return;
  }
  if (wf->rec.kind == WorkflowKind::Sell && available(wf->rec.user) < wf->rec.amount) {
    finish(wf, WorkflowOutcome::InsufficientBalance);
    return;
  }
  const SimTime admitted = risk_.admit(scheduler_.now());
  scheduler_.schedule(admitted + routing_delay(), priority::kAgent, "order_route", [this, wf] {
    Order o;
    o.owner = wf->rec.user;
    o.side = wf->rec.kind == WorkflowKind::Buy ? Side::Bid : Side::Ask;
    o.qty = wf->rec.amount;
    o.kind = OrderKind::Market;
    if (o.side == Side::Ask) {
      o.qty = std::min(o.qty, available(wf->rec.user));
      if (o.qty.micro <= 0) {
        finish(wf, WorkflowOutcome::InsufficientBalance);
        return;
      }
    }
    PlaceResult r = book_.place(std::move(o), scheduler_.now());
    if (r.status == PlaceStatus::TradingHalted) {
      finish(wf, WorkflowOutcome::TradingHalted);
      return;
    }
    if (r.status != PlaceStatus::Accepted) {
      finish(wf, WorkflowOutcome::NotOnboarded, std::string(to_string(r.status)));
      return;
    }
    if (r.trades.empty()) {
      finish(wf, WorkflowOutcome::NoLiquidity);
      return;
    }
    if (level_ == LogLevel::Full) {
      for (const Trade& t : r.trades) {
        log_.append(t.t, "exchange", "trade",
                    {{"maker", t.maker}, {"taker", t.taker}, {"side", to_string(t.taker_side)},
                     {"price", t.price.micro_usd}, {"qty", t.qty.micro}});
      }
    }
    wf->rec.amount = r.filled;
    settlement_.enqueue(r.trades, [this, wf](bool ok) {
      finish(wf, ok ? WorkflowOutcome::Completed : WorkflowOutcome::SettlementFailed);
    });
  });
}

void Orchestrator::run_issue(std::shared_ptr<Workflow> wf) {
  const SimTime admitted = risk_.admit(scheduler_.now());
  auto go = [this, wf] {
    issuance_.issue(wf->rec.user, wf->rec.amount, [this, wf](const IssuanceResult& r) {
      wf->rec.agent_ms = r.submitted_at - wf->rec.started;
      wf->rec.chain_ms = r.confirmed_at - r.submitted_at;
      finish(wf, r.outcome, r.reason);
    });
  };
  if (admitted == scheduler_.now()) {
    go();
  } else {
    scheduler_.schedule(admitted, priority::kAgent, "risk_admit", go);
  }
}

void Orchestrator::run_redeem(std::shared_ptr<Workflow> wf) {
  if (wf->rec.amount.micro <= 0 || available(wf->rec.user) < wf->rec.amount) {
    finish(wf, WorkflowOutcome::InsufficientBalance);
    return;
  }
  reserved_[wf->rec.user] += wf->rec.amount;
  const SimTime admitted = risk_.admit(scheduler_.now());
  auto go = [this, wf] {
    issuance_.redeem(wf->rec.user, wf->rec.amount, [this, wf](const IssuanceResult& r) {
      auto it = reserved_.find(wf->rec.user);
      it->second -= wf->rec.amount;
      if (it->second.micro == 0) reserved_.erase(it);
      wf->rec.agent_ms = r.submitted_at - wf->rec.started;
      wf->rec.chain_ms = r.confirmed_at - r.submitted_at;
      finish(wf, r.outcome, r.reason);
    });
  };
  if (admitted == scheduler_.now()) {
    go();
  } else {
    scheduler_.schedule(admitted, priority::kAgent, "risk_admit", go);
  }
}

}  // namespace goldsim
