#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goldsim/pause.hpp"

namespace goldsim {

// Environment events acting on the pause-flag state machine.
enum class PauseEvent {
  OracleFaultOnset,    // risk agent trips the breaker
  VaultFaultOnset,     // short attestation; risk agent freezes issuance
  CoveringAttestation,
  Clear,
  CooldownExpiry,
  GovernanceUnpause,
};

std::string_view to_string(PauseEvent e);

// Abstract model state: the controller plus whether the last attestation covers supply.
struct PauseModelState {
  PauseController controller;
  bool covered{true};

  bool operational() const { return controller.state().operational(); }
  std::uint8_t key() const;
  std::string describe() const;
};

// Applies `e`; returns false when the event is not enabled in `s`.
bool apply(PauseModelState& s, PauseEvent e, Millis cooldown);

struct LivenessReport {
  std::size_t states{0};
  std::size_t sequences{0};
  std::vector<std::string> deadlocks;      // halted states with no enabled transition
  std::vector<std::string> unrecoverable;  // halted states that cannot reach an operational one
  std::vector<std::string> failed_sequences;

  bool ok() const { return deadlocks.empty() && unrecoverable.empty() && failed_sequences.empty(); }
};

// Explores every reachable state and every event interleaving up to
// `max_depth`, then checks that recovery events alone restore operation.
LivenessReport check_pause_liveness(std::size_t max_depth = 7, Millis cooldown = 300'000);

}  // namespace goldsim
