#include "goldsim/pause.hpp"

namespace goldsim {

void PauseController::trip(SimTime now) {
  if (state_.trading_paused) return;
  state_.trading_paused = true;
  state_.breaker_tripped_at = now;
}

bool PauseController::auto_lift(SimTime now, Millis cooldown) {
  if (!state_.trading_paused || !state_.breaker_tripped_at) return false;
  if (now - *state_.breaker_tripped_at < cooldown) return false;
  state_.trading_paused = false;
  state_.breaker_tripped_at.reset();
  return true;
}

bool PauseController::governance_unpause() {
  if (!state_.trading_paused) return false;
  state_.trading_paused = false;
  state_.breaker_tripped_at.reset();
  return true;
}

void PauseController::freeze_issuance() { state_.issuance_paused = true; }

bool PauseController::clear_freeze(bool reserve_covered) {
  if (!state_.issuance_paused || !reserve_covered) return false;
  state_.issuance_paused = false;
  return true;
}

}  // namespace goldsim
