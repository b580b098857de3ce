#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "goldsim/types.hpp"

namespace goldsim {

// On-chain tunables. Units: fractions in ppm, durations in ms, epsilon in micro-OZ.
enum class ParamKey {
  BreakerSwingThreshold,
  BreakerWindow,
  BreakerCooldown,
  Epsilon,
  FeeRate,
  DivergenceThreshold,
};

std::string_view to_string(ParamKey k);
std::optional<ParamKey> param_from_string(std::string_view s);

// Converts a human-facing value (fraction, milliseconds, OZ) to stored units.
std::int64_t param_to_stored(ParamKey k, double value);
double param_from_stored(ParamKey k, std::int64_t stored);

struct ParamBounds {
  std::int64_t min{0};
  std::int64_t max{0};
  // When set, `max` is interpreted as ppm of the attested reserve.
  bool max_relative_to_reserve{false};
};

// Fixed for the whole run; every ParamStore write goes through admits().
class BoundsRegistry {
 public:
  static BoundsRegistry defaults();

  void set(ParamKey k, ParamBounds b) { bounds_[k] = b; }
  const ParamBounds& at(ParamKey k) const { return bounds_.at(k); }
  bool admits(ParamKey k, std::int64_t value, TokenAmount attested_reserve) const;
  std::int64_t effective_max(ParamKey k, TokenAmount attested_reserve) const;

 private:
  std::map<ParamKey, ParamBounds> bounds_;
};

class ParamStore {
 public:
  static ParamStore defaults();

  std::int64_t get(ParamKey k) const { return values_.at(k); }
  // Returns false and leaves the store untouched when the value is out of bounds.
  bool set(ParamKey k, std::int64_t value, const BoundsRegistry& bounds, TokenAmount attested_reserve);
  // Unchecked write used for scenario genesis; callers validate first.
  void set_unchecked(ParamKey k, std::int64_t value) { values_[k] = value; }

  Ppm swing_threshold() const { return get(ParamKey::BreakerSwingThreshold); }
  Millis breaker_window() const { return get(ParamKey::BreakerWindow); }
  Millis breaker_cooldown() const { return get(ParamKey::BreakerCooldown); }
  TokenAmount epsilon() const { return TokenAmount{get(ParamKey::Epsilon)}; }
  Ppm fee_rate() const { return get(ParamKey::FeeRate); }
  Ppm divergence_threshold() const { return get(ParamKey::DivergenceThreshold); }

  const std::map<ParamKey, std::int64_t>& values() const { return values_; }

 private:
  std::map<ParamKey, std::int64_t> values_;
};

}  // namespace goldsim
