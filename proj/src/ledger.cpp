#include "goldsim/ledger.hpp"

#include <cstdlib>

namespace goldsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Receipt accepted(TxKind kind) {
  Receipt r;
  r.kind = kind;
  r.accepted = true;
  return r;
}

Receipt reverted(TxKind kind, std::string_view reason) {
  Receipt r;
  r.kind = kind;
  r.accepted = false;
  r.reason = std::string(reason);
  return r;
}

}  // namespace

std::string_view to_string(TxKind k) {
  switch (k) {
    case TxKind::Mint: return "mint";
    case TxKind::Burn: return "burn";
    case TxKind::Transfer: return "transfer";
    case TxKind::PostPrice: return "post_price";
    case TxKind::SetReserve: return "set_reserve";
    case TxKind::Governance: return "governance";
  }
  return "unknown";
}

TripDecision evaluate_breaker(const std::deque<PriceSample>& window, SimTime now, Millis window_len, Ppm threshold) {
  if (window.empty()) return TripDecision::NoTrip;
  const std::int64_t p_now = window.back().price.micro_usd;
  const SimTime from = now - window_len;
  for (const PriceSample& s : window) {
    if (s.t < from || s.t > now) continue;
    const std::int64_t p_s = s.price.micro_usd;
    if (p_s <= 0) continue;
    // |p_now / p_s - 1| > threshold  <=>  |p_now - p_s| * 1e6 > threshold * p_s
    const __int128 lhs = static_cast<__int128>(std::llabs(p_now - p_s)) * kPpmOne;
    const __int128 rhs = static_cast<__int128>(threshold) * p_s;
    if (lhs > rhs) return TripDecision::Trip;
  }
  return TripDecision::NoTrip;
}

Ledger::Ledger(Scheduler& scheduler, EventLog& log, LedgerConfig config, BoundsRegistry bounds, ParamStore params)
    : scheduler_(scheduler),
      log_(log),
      config_(std::move(config)),
      bounds_(std::move(bounds)),
      governance_(config_.governance) {
  state_.params = std::move(params);
}

void Ledger::start(SimTime first_block) {
  scheduler_.schedule(first_block, priority::kLedger, "block", [this] {
    produce_block(scheduler_.now());
    start(scheduler_.now() + config_.block_interval);
  });
}

SimTime Ledger::next_block_time(SimTime t) const {
  const Millis iv = config_.block_interval;
  Millis k = (t.ms + iv - 1) / iv;
  if (height_ > 0 && k * iv <= block_now_.ms) k = block_now_.ms / iv + 1;
  return SimTime{k * iv};
}

TxId Ledger::submit_tx(Tx tx, ReceiptCallback on_confirm) {
  const TxId id = next_tx_id_++;
  tx.submitted_at = scheduler_.now();
  pending_.push_back(PendingTx{id, std::move(tx), std::move(on_confirm)});
  return id;
}

Block Ledger::produce_block(SimTime now) {
  block_now_ = now;
  Block block;
  block.height = ++height_;
  block.timestamp = now;

  for (std::uint64_t id : governance_.close_voting(now)) {
    const ParamProposal* p = governance_.param_proposal(id);
    log_.append(now, "ledger", "governance_tally",
                {{"proposal", id},
                 {"param", to_string(p->key)},
                 {"votes_for", p->votes_for},
                 {"votes_against", p->votes_against},
                 {"total_power", p->total_power},
                 {"state", to_string(p->state)}});
  }

  if (breaker_auto_lift(now)) {
    log_.append(now, "ledger", "breaker_lifted", {{"by", "cooldown"}});
  }

  std::vector<ReceiptCallback> callbacks;
  std::size_t executed = 0;
  while (!pending_.empty() && (config_.max_tx_per_block == 0 || executed < config_.max_tx_per_block)) {
    PendingTx p = std::move(pending_.front());
    pending_.pop_front();
    Receipt r = execute(p.tx, now);
    r.id = p.id;
    r.height = block.height;
    r.block_time = now;
    log_receipt(p.tx, r, now);
    (r.accepted ? block.accepted : block.reverted) += 1;
    block.receipts.push_back(r);
    callbacks.push_back(std::move(p.callback));
    ++executed;
  }

  if (evaluate_breaker(now) == TripDecision::Trip) {
    log_.append(now, "ledger", "breaker_tripped",
                {{"by", "price_swing"}, {"feed", to_string(state_.reference_feed)}});
  }

  log_.append(now, "ledger", "block",
              {{"height", block.height},
               {"txs", block.receipts.size()},
               {"accepted", block.accepted},
               {"reverted", block.reverted},
               {"supply", state_.total_supply.micro},
               {"reserve", state_.attested_reserve.micro},
               {"trading_paused", state_.trading_paused()},
               {"issuance_paused", state_.issuance_paused()}});

  for (auto& obs : executed_observers_) obs(block);

  scheduler_.schedule(now + config_.commit_latency, priority::kAgent, "block_commit",
                      [this, block, cbs = std::move(callbacks)]() mutable {
                        for (std::size_t i = 0; i < cbs.size(); ++i) {
                          if (cbs[i]) cbs[i](block.receipts[i]);
                        }
                        for (auto& obs : committed_observers_) obs(block);
                      });
  return block;
}

Receipt Ledger::execute(const Tx& tx, SimTime now) {
  return std::visit(
      overloaded{
          [&](const MintTx& m) { return execute_mint(tx.sender, m.to, m.amount); },
          [&](const BurnTx& b) { return execute_burn(tx.sender, b.from, b.amount); },
          [&](const TransferTx& t) { return execute_transfer(tx.sender, t.from, t.to, t.amount); },
          [&](const PostPriceTx& p) {
            if (config_.oracles.count(tx.sender) == 0) return reverted(TxKind::PostPrice, revert::kUnauthorized);
            post_price(p.sample, now);
            return accepted(TxKind::PostPrice);
          },
          [&](const SetReserveTx& s) { return set_attested_reserve(tx.sender, s.amount); },
          [&](const GovernanceTx& g) { return execute_governance(tx.sender, g, now); },
      },
      tx.payload);
}

Receipt Ledger::execute_mint(const Address& sender, const Address& to, TokenAmount amount) {
  if (config_.minters.count(sender) == 0) return reverted(TxKind::Mint, revert::kUnauthorized);
  if (amount.micro <= 0) return reverted(TxKind::Mint, revert::kInvalidAmount);
  if (state_.total_supply + amount > state_.attested_reserve + state_.epsilon()) {
    return reverted(TxKind::Mint, revert::kReserveCeiling);
  }
  if (state_.issuance_paused()) return reverted(TxKind::Mint, revert::kIssuancePaused);
  if (state_.trading_paused()) return reverted(TxKind::Mint, revert::kTradingHalted);
  credit(to, amount);
  state_.total_supply += amount;
  return accepted(TxKind::Mint);
}

Receipt Ledger::execute_burn(const Address& sender, const Address& owner, TokenAmount amount) {
  if (sender != owner && config_.minters.count(sender) == 0) return reverted(TxKind::Burn, revert::kUnauthorized);
  if (amount.micro <= 0) return reverted(TxKind::Burn, revert::kInvalidAmount);
  if (state_.trading_paused()) return reverted(TxKind::Burn, revert::kTradingHalted);
  if (!debit(owner, amount)) return reverted(TxKind::Burn, revert::kInsufficientBalance);
  state_.total_supply -= amount;
  return accepted(TxKind::Burn);
}

Receipt Ledger::execute_transfer(const Address& sender, const Address& from, const Address& to, TokenAmount amount) {
  if (sender != from && config_.settlers.count(sender) == 0) {
    return reverted(TxKind::Transfer, revert::kUnauthorized);
  }
  if (amount.micro <= 0) return reverted(TxKind::Transfer, revert::kInvalidAmount);
  if (state_.trading_paused()) return reverted(TxKind::Transfer, revert::kTradingHalted);
  if (!debit(from, amount)) return reverted(TxKind::Transfer, revert::kInsufficientBalance);
  credit(to, amount);
  return accepted(TxKind::Transfer);
}

Receipt Ledger::set_attested_reserve(const Address& auditor, TokenAmount amount) {
  if (config_.auditors.count(auditor) == 0) return reverted(TxKind::SetReserve, revert::kUnauthorized);
  if (amount.micro < 0) return reverted(TxKind::SetReserve, revert::kInvalidAmount);
  state_.attested_reserve = amount;
  return accepted(TxKind::SetReserve);
}

TripDecision Ledger::evaluate_breaker(SimTime now) {
  if (state_.trading_paused()) return TripDecision::NoTrip;
  const TripDecision d = goldsim::evaluate_breaker(price_window(state_.reference_feed), now,
                                                   state_.params.breaker_window(), state_.params.swing_threshold());
  if (d == TripDecision::Trip) state_.pause.trip(now);
  return d;
}

bool Ledger::breaker_auto_lift(SimTime now) {
  return state_.pause.auto_lift(now, state_.params.breaker_cooldown());
}

bool Ledger::is_operator(const Address& a) const {
  if (config_.operators.count(a) != 0) return true;
  for (const Address& s : config_.governance.signers) {
    if (s == a) return true;
  }
  return false;
}

Receipt Ledger::execute_governance(const Address& sender, const GovernanceTx& g, SimTime now) {
  constexpr TxKind kind = TxKind::Governance;
  return std::visit(
      overloaded{
          [&](const gov::TripBreaker& t) {
            if (config_.risk_controllers.count(sender) == 0 && !is_operator(sender)) {
              return reverted(kind, revert::kUnauthorized);
            }
            state_.pause.trip(now);
            log_.append(now, "ledger", "breaker_tripped", {{"by", sender}, {"reason", t.reason}});
            return accepted(kind);
          },
          [&](const gov::FreezeIssuance& f) {
            if (config_.risk_controllers.count(sender) == 0) return reverted(kind, revert::kUnauthorized);
            state_.pause.freeze_issuance();
            log_.append(now, "ledger", "issuance_frozen", {{"by", sender}, {"reason", f.reason}});
            return accepted(kind);
          },
          [&](const gov::ClearFreeze&) {
            if (!is_operator(sender)) return reverted(kind, revert::kUnauthorized);
            if (!state_.issuance_paused()) return reverted(kind, revert::kNotPaused);
            if (!state_.pause.clear_freeze(state_.reserve_covers_supply())) {
              return reverted(kind, revert::kReserveNotCovered);
            }
            log_.append(now, "ledger", "issuance_unfrozen", {{"by", sender}});
            return accepted(kind);
          },
          [&](const gov::Unpause&) {
            if (!is_operator(sender)) return reverted(kind, revert::kUnauthorized);
            if (!state_.pause.governance_unpause()) return reverted(kind, revert::kNotPaused);
            log_.append(now, "ledger", "breaker_lifted", {{"by", sender}});
            return accepted(kind);
          },
          [&](const gov::SetReferenceFeed& s) {
            if (config_.risk_controllers.count(sender) == 0) return reverted(kind, revert::kUnauthorized);
            state_.reference_feed = s.feed;
            return accepted(kind);
          },
          [&](const gov::ProposeParam& p) {
            ParamProposal& prop =
                governance_.propose(p.key, p.value, sender, now, state_.balances, state_.total_supply);
            Receipt r = accepted(kind);
            r.ref = prop.id;
            r.reason = "proposed";
            log_.append(now, "ledger", "governance_proposed",
                        {{"proposal", prop.id},
                         {"param", to_string(p.key)},
                         {"value", p.value},
                         {"by", sender},
                         {"executable_at", prop.executable_at().ms}});
            return r;
          },
          [&](const gov::CastVote& v) {
            const VoteResult res = governance_.vote(v.proposal, sender, v.support, now);
            Receipt r = res == VoteResult::Recorded ? accepted(kind) : reverted(kind, to_string(res));
            r.ref = v.proposal;
            if (r.accepted) r.reason = std::string(to_string(res));
            log_.append(now, "ledger", "governance_vote",
                        {{"proposal", v.proposal}, {"by", sender}, {"support", v.support}, {"result", to_string(res)}});
            return r;
          },
          [&](const gov::ExecuteParam& e) {
            const ExecResult res =
                governance_.execute(e.proposal, now, bounds_, state_.params, state_.attested_reserve);
            Receipt r = res == ExecResult::Executed ? accepted(kind) : reverted(kind, to_string(res));
            r.ref = e.proposal;
            if (r.accepted) r.reason = std::string(to_string(res));
            nlohmann::ordered_json detail{{"proposal", e.proposal}, {"result", to_string(res)}};
            if (const ParamProposal* p = governance_.param_proposal(e.proposal)) {
              detail["param"] = to_string(p->key);
              detail["value"] = p->new_value;
              if (res == ExecResult::RejectedOutOfBounds) {
                rejections_.push_back(GovernanceRejection{p->id, p->key, p->new_value, now});
              }
            }
            log_.append(now, "ledger", "governance_execute", std::move(detail));
            return r;
          },
          [&](const gov::ProposeUpdate& u) {
            if (!is_operator(sender)) return reverted(kind, revert::kUnauthorized);
            MultisigProposal& m = governance_.propose_update(u.update);
            Receipt r = accepted(kind);
            r.ref = m.id;
            r.reason = "proposed";
            log_.append(now, "ledger", "multisig_proposed",
                        {{"proposal", m.id},
                         {"agent", u.update.agent},
                         {"version", u.update.version},
                         {"required", m.signers_required}});
            return r;
          },
          [&](const gov::SignUpdate& s) {
            MultisigProposal* m = governance_.update_proposal(s.proposal);
            const bool was_executed = m != nullptr && m->executed;
            const UpdateStatus st = governance_.sign(s.proposal, sender);
            const bool ok = st == UpdateStatus::Pending || st == UpdateStatus::Executable;
            Receipt r = ok ? accepted(kind) : reverted(kind, to_string(st));
            r.ref = s.proposal;
            if (ok) r.reason = std::string(to_string(st));
            nlohmann::ordered_json detail{{"proposal", s.proposal}, {"by", sender}, {"status", to_string(st)}};
            if (m != nullptr) detail["signatures"] = m->signatures.size();
            log_.append(now, "ledger", "multisig_sign", std::move(detail));
            if (m != nullptr && !was_executed && m->executed) agent_updates_.push_back(m->payload);
            return r;
          },
      },
      g.action);
}

void Ledger::post_price(const PriceSample& s, SimTime now) {
  auto& w = s.feed == FeedId::Primary ? primary_window_ : secondary_window_;
  w.push_back(s);
  // Keep one window-length of history; the breaker window is bounded above.
  const Millis keep = bounds_.at(ParamKey::BreakerWindow).max;
  while (!w.empty() && w.front().t < now - keep) w.pop_front();
}

void Ledger::log_receipt(const Tx& tx, const Receipt& r, SimTime now) {
  const TxKind k = tx.kind();
  const bool routine = k == TxKind::Transfer || k == TxKind::PostPrice || k == TxKind::Mint || k == TxKind::Burn;
  if (config_.log_level == LogLevel::Compact && routine && r.accepted) return;
  if (k == TxKind::PostPrice && r.accepted) return;
  nlohmann::ordered_json d{{"tx", r.id}, {"kind", to_string(k)}, {"sender", tx.sender}, {"accepted", r.accepted}};
  if (!r.reason.empty()) d["reason"] = r.reason;
  std::visit(overloaded{
                 [&](const MintTx& m) { d["to"] = m.to; d["amount"] = m.amount.micro; if (!m.batch_id.empty()) d["batch"] = m.batch_id; },
                 [&](const BurnTx& b) { d["from"] = b.from; d["amount"] = b.amount.micro; },
                 [&](const TransferTx& t) { d["from"] = t.from; d["to"] = t.to; d["amount"] = t.amount.micro; },
                 [&](const PostPriceTx& p) { d["feed"] = to_string(p.sample.feed); d["price"] = p.sample.price.micro_usd; },
                 [&](const SetReserveTx& s) { d["amount"] = s.amount.micro; },
                 [&](const GovernanceTx&) {},
             },
             tx.payload);
  log_.append(now, "ledger", "receipt", std::move(d));
}

void Ledger::genesis_credit(const Address& to, TokenAmount amount) {
  credit(to, amount);
  state_.total_supply += amount;
}

void Ledger::genesis_reserve(TokenAmount amount) { state_.attested_reserve = amount; }

std::vector<GovernanceRejection> Ledger::drain_governance_rejections() {
  std::vector<GovernanceRejection> out;
  out.swap(rejections_);
  return out;
}

std::vector<AgentUpdate> Ledger::drain_agent_updates() {
  std::vector<AgentUpdate> out;
  out.swap(agent_updates_);
  return out;
}

TokenAmount Ledger::balance_of(const Address& a) const {
  auto it = state_.balances.find(a);
  return it == state_.balances.end() ? TokenAmount{} : it->second;
}

void Ledger::credit(const Address& a, TokenAmount amount) { state_.balances[a] += amount; }

bool Ledger::debit(const Address& a, TokenAmount amount) {
  auto it = state_.balances.find(a);
  if (it == state_.balances.end() || it->second < amount) return false;
  it->second -= amount;
  return true;
}

}  // namespace goldsim
