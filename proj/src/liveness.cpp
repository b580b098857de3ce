#include "goldsim/liveness.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>

namespace goldsim {

namespace {

constexpr std::array<PauseEvent, 6> kEvents{PauseEvent::OracleFaultOnset, PauseEvent::VaultFaultOnset,
                                            PauseEvent::CoveringAttestation, PauseEvent::Clear,
                                            PauseEvent::CooldownExpiry, PauseEvent::GovernanceUnpause};
constexpr std::array<PauseEvent, 4> kRecovery{PauseEvent::CoveringAttestation, PauseEvent::Clear,
                                              PauseEvent::CooldownExpiry, PauseEvent::GovernanceUnpause};

}  // namespace

std::string_view to_string(PauseEvent e) {
  switch (e) {
    case PauseEvent::OracleFaultOnset: return "oracle_fault_onset";
    case PauseEvent::VaultFaultOnset: return "vault_fault_onset";
    case PauseEvent::CoveringAttestation: return "covering_attestation";
    case PauseEvent::Clear: return "clear";
    case PauseEvent::CooldownExpiry: return "cooldown_expiry";
    case PauseEvent::GovernanceUnpause: return "governance_unpause";
  }
  return "unknown";
}

std::uint8_t PauseModelState::key() const {
  const PauseState& p = controller.state();
  return static_cast<std::uint8_t>((p.trading_paused ? 1 : 0) | (p.issuance_paused ? 2 : 0) | (covered ? 4 : 0));
}

std::string PauseModelState::describe() const {
  const PauseState& p = controller.state();
  return std::string("trading_paused=") + (p.trading_paused ? "1" : "0") +
         " issuance_paused=" + (p.issuance_paused ? "1" : "0") + " covered=" + (covered ? "1" : "0");
}

bool apply(PauseModelState& s, PauseEvent e, Millis cooldown) {
  // Trips happen at t = 0; cooldown expiry is observed at t = cooldown.
  switch (e) {
    case PauseEvent::OracleFaultOnset:
      if (s.controller.state().trading_paused) return false;
      s.controller.trip(SimTime{0});
      return true;
    case PauseEvent::VaultFaultOnset:
      if (!s.covered && s.controller.state().issuance_paused) return false;
      s.covered = false;
      s.controller.freeze_issuance();
      return true;
    case PauseEvent::CoveringAttestation:
      if (s.covered) return false;
      s.covered = true;
      return true;
    case PauseEvent::Clear:
      return s.controller.clear_freeze(s.covered);
    case PauseEvent::CooldownExpiry:
      return s.controller.auto_lift(SimTime{cooldown}, cooldown);
    case PauseEvent::GovernanceUnpause:
      return s.controller.governance_unpause();
  }
  return false;
}

LivenessReport check_pause_liveness(std::size_t max_depth, Millis cooldown) {
  LivenessReport report;

  // Reachable state graph.
  std::map<std::uint8_t, PauseModelState> states;
  std::map<std::uint8_t, std::vector<std::pair<PauseEvent, std::uint8_t>>> edges;
  std::deque<PauseModelState> frontier{PauseModelState{}};
  states.emplace(frontier.front().key(), frontier.front());
  while (!frontier.empty()) {
    const PauseModelState s = frontier.front();
    frontier.pop_front();
    for (PauseEvent e : kEvents) {
      PauseModelState next = s;
      if (!apply(next, e, cooldown)) continue;
      edges[s.key()].emplace_back(e, next.key());
      if (states.emplace(next.key(), next).second) frontier.push_back(next);
    }
  }
  report.states = states.size();

  // Backward closure from operational states over recovery edges only.
  std::map<std::uint8_t, bool> recovers;
  for (const auto& [k, s] : states) recovers[k] = s.operational();
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [k, out] : edges) {
      if (recovers[k]) continue;
      for (const auto& [e, to] : out) {
        const bool recovery = std::find(kRecovery.begin(), kRecovery.end(), e) != kRecovery.end();
        if (recovery && recovers[to]) {
          recovers[k] = true;
          changed = true;
          break;
        }
      }
    }
  }
  for (const auto& [k, s] : states) {
    if (s.operational()) continue;
    if (edges[k].empty()) report.deadlocks.push_back(s.describe());
    if (!recovers[k]) report.unrecoverable.push_back(s.describe());
  }

  // Every interleaving up to max_depth, each followed by the canonical recovery.
  std::vector<PauseEvent> seq;
  std::function<void(const PauseModelState&)> walk = [&](const PauseModelState& s) {
    PauseModelState r = s;
    for (PauseEvent e : {PauseEvent::CoveringAttestation, PauseEvent::Clear, PauseEvent::CooldownExpiry}) {
      apply(r, e, cooldown);
    }
    ++report.sequences;
    if (!r.operational() && report.failed_sequences.size() < 10) {
      std::string text;
      for (PauseEvent e : seq) text += std::string(to_string(e)) + " ";
      report.failed_sequences.push_back(text + "-> " + r.describe());
    }
    if (seq.size() == max_depth) return;
    for (PauseEvent e : kEvents) {
      PauseModelState next = s;
      if (!apply(next, e, cooldown)) continue;
      seq.push_back(e);
      walk(next);
      seq.pop_back();
    }
  };
  walk(PauseModelState{});
  return report;
}

}  // namespace goldsim
