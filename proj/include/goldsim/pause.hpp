#pragma once

#include <optional>

#include "goldsim/types.hpp"

namespace goldsim {

struct PauseState {
  bool trading_paused{false};
  std::optional<SimTime> breaker_tripped_at;
  bool issuance_paused{false};

  bool operational() const { return !trading_paused && !issuance_paused; }
  bool operator==(const PauseState&) const = default;
};

// Pause-flag state machine shared by the ledger contract and the liveness
// model checker.
//
//   breaker:  trip -> trading_paused; lifted by cooldown expiry or governance unpause
//   freeze:   freeze -> issuance_paused; lifted only by an explicit clear while
//             the attested reserve covers supply
class PauseController {
 public:
  void trip(SimTime now);
  // Lifts the breaker once `cooldown` has elapsed since the trip.
  bool auto_lift(SimTime now, Millis cooldown);
  bool governance_unpause();

  void freeze_issuance();
  // Returns true when the freeze was lifted. An uncovered clear is refused.
  bool clear_freeze(bool reserve_covered);

  const PauseState& state() const { return state_; }

 private:
  PauseState state_;
};

}  // namespace goldsim
