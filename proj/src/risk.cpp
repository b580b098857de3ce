#include "goldsim/risk.hpp"

#include <algorithm>
#include <cmath>

namespace goldsim {

std::string_view to_string(AlertKind k) {
  switch (k) {
    case AlertKind::OracleStale: return "OracleStale";
    case AlertKind::OracleDiverged: return "OracleDiverged";
    case AlertKind::ReserveShortfall: return "ReserveShortfall";
    case AlertKind::Concentration: return "Concentration";
    case AlertKind::GovernanceOutOfBounds: return "GovernanceOutOfBounds";
  }
  return "Unknown";
}

SimTime AdmissionGate::admit(SimTime now) {
  const double start = std::max(static_cast<double>(now.ms), tat_ms_);
  tat_ms_ = start + interval_ms_;
  const auto t = static_cast<std::int64_t>(std::ceil(start));
  starts_.push_back(t);
  ++total_;
  return SimTime{t};
}

std::size_t AdmissionGate::admitted_between(SimTime from, SimTime to) {
  while (!starts_.empty() && starts_.front() < from.ms) starts_.pop_front();
  auto end = std::lower_bound(starts_.begin(), starts_.end(), to.ms);
  return static_cast<std::size_t>(end - starts_.begin());
}

RiskAgent::RiskAgent(RiskConfig config, Ledger& ledger, Oracle& oracle, EventLog& log, Address self)
    : config_(std::move(config)),
      ledger_(ledger),
      oracle_(oracle),
      log_(log),
      self_(std::move(self)),
      gate_(config_.service_rate * config_.safety_ceiling) {}

void RiskAgent::cycle(SimTime now) {
  apply_updates(now);
  check_oracle(now);
  check_reserve(now);
  check_concentration(now);
  check_governance(now);
  const std::size_t served = gate_.admitted_between(now - config_.cycle, now);
  utilization_ = static_cast<double>(served) / (config_.service_rate * static_cast<double>(config_.cycle) / 1000.0);
  peak_utilization_ = std::max(peak_utilization_, utilization_);
}

void RiskAgent::submit(GovernanceAction action) {
  ledger_.submit_tx(Tx{self_, GovernanceTx{std::move(action)}, {}});
}

RiskAlert& RiskAgent::raise(AlertKind kind, SimTime now, std::string subject, std::string action) {
  alerts_.push_back(RiskAlert{kind, now, std::move(subject), std::move(action), std::nullopt});
  const RiskAlert& a = alerts_.back();
  log_.append(now, "risk", "alert",
              {{"kind", to_string(kind)}, {"subject", a.subject}, {"action", a.action_taken}});
  for (auto& obs : alert_observers_) obs(a);
  return alerts_.back();
}

void RiskAgent::clear(std::size_t index, SimTime now) {
  RiskAlert& a = alerts_[index];
  a.cleared_at = now;
  log_.append(now, "risk", "alert_cleared", {{"kind", to_string(a.kind)}, {"subject", a.subject}});
}

void RiskAgent::apply_updates(SimTime now) {
  for (const AgentUpdate& u : ledger_.drain_agent_updates()) {
    if (u.agent == "risk") version_ = u.version;
    log_.append(now, "risk", "agent_update_applied", {{"agent", u.agent}, {"version", u.version}});
    for (auto& obs : update_observers_) obs(u);
  }
}

void RiskAgent::check_oracle(SimTime now) {
  const OracleStatus status =
      detect_divergence(oracle_.feed(FeedId::Primary), oracle_.feed(FeedId::Secondary), now,
                        config_.staleness_threshold, ledger_.state().params.divergence_threshold());
  if (status != OracleStatus::None && !oracle_alert_) {
    const AlertKind kind = status == OracleStatus::Stale ? AlertKind::OracleStale : AlertKind::OracleDiverged;
    oracle_.set_consumer_feed(FeedId::Secondary);
    submit(gov::SetReferenceFeed{FeedId::Secondary});
    submit(gov::TripBreaker{std::string(to_string(kind))});
    raise(kind, now, "primary", "switched to secondary feed; breaker tripped");
    oracle_alert_ = alerts_.size() - 1;
  } else if (status == OracleStatus::None && oracle_alert_) {
    oracle_.set_consumer_feed(FeedId::Primary);
    submit(gov::SetReferenceFeed{FeedId::Primary});
    clear(*oracle_alert_, now);
    oracle_alert_.reset();
  }
}

void RiskAgent::check_reserve(SimTime now) {
  const LedgerState& s = ledger_.state();
  const bool covered = s.reserve_covers_supply();
  if (!covered && !shortfall_active_) {
    shortfall_active_ = true;
    freeze_confirmed_ = false;
    ledger_.submit_tx(Tx{self_, GovernanceTx{gov::FreezeIssuance{"reserve shortfall"}}, {}},
                      [this](const Receipt& r) { freeze_confirmed_ = freeze_confirmed_ || r.accepted; });
    raise(AlertKind::ReserveShortfall, now, "reserve", "issuance frozen");
    shortfall_alert_ = alerts_.size() - 1;
  } else if (shortfall_active_ && freeze_confirmed_ && covered && !s.issuance_paused()) {
    shortfall_active_ = false;
    clear(*shortfall_alert_, now);
    shortfall_alert_.reset();
  }
}

void RiskAgent::check_concentration(SimTime now) {
  const LedgerState& s = ledger_.state();
  const __int128 limit = static_cast<__int128>(config_.concentration_limit) * s.total_supply.micro;
  std::vector<Address> crossed;
  for (const auto& [holder, bal] : s.balances) {
    if (config_.exempt_holders.count(holder) != 0) continue;
    const bool over = s.total_supply.micro > 0 && static_cast<__int128>(bal.micro) * kPpmOne > limit;
    if (over && concentrated_.count(holder) == 0) crossed.push_back(holder);
    if (!over) concentrated_.erase(holder);
  }
  std::sort(crossed.begin(), crossed.end());
  for (const Address& holder : crossed) {
    concentrated_.insert(holder);
    raise(AlertKind::Concentration, now, holder, "flagged");
  }
}

void RiskAgent::check_governance(SimTime now) {
  for (const GovernanceRejection& r : ledger_.drain_governance_rejections()) {
    raise(AlertKind::GovernanceOutOfBounds, now, "proposal " + std::to_string(r.proposal),
          "rejected " + std::string(to_string(r.key)) + "=" + std::to_string(r.value));
  }
}

}  // namespace goldsim
