#include "goldsim/params.hpp"

#include <cmath>

namespace goldsim {

std::string_view to_string(ParamKey k) {
  switch (k) {
    case ParamKey::BreakerSwingThreshold: return "breaker_swing_threshold";
    case ParamKey::BreakerWindow: return "breaker_window";
    case ParamKey::BreakerCooldown: return "breaker_cooldown";
    case ParamKey::Epsilon: return "epsilon";
    case ParamKey::FeeRate: return "fee_rate";
    case ParamKey::DivergenceThreshold: return "divergence_threshold";
  }
  return "unknown";
}

std::optional<ParamKey> param_from_string(std::string_view s) {
  for (auto k : {ParamKey::BreakerSwingThreshold, ParamKey::BreakerWindow, ParamKey::BreakerCooldown,
                 ParamKey::Epsilon, ParamKey::FeeRate, ParamKey::DivergenceThreshold}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::int64_t param_to_stored(ParamKey k, double value) {
  switch (k) {
    case ParamKey::BreakerSwingThreshold:
    case ParamKey::FeeRate:
    case ParamKey::DivergenceThreshold:
      return fraction_to_ppm(value);
    case ParamKey::BreakerWindow:
    case ParamKey::BreakerCooldown:
      return static_cast<std::int64_t>(std::llround(value));
    case ParamKey::Epsilon:
      return TokenAmount::from_oz(value).micro;
  }
  return 0;
}

double param_from_stored(ParamKey k, std::int64_t stored) {
  switch (k) {
    case ParamKey::BreakerSwingThreshold:
    case ParamKey::FeeRate:
    case ParamKey::DivergenceThreshold:
      return ppm_to_fraction(stored);
    case ParamKey::BreakerWindow:
    case ParamKey::BreakerCooldown:
      return static_cast<double>(stored);
    case ParamKey::Epsilon:
      return TokenAmount{stored}.oz();
  }
  return 0.0;
}

BoundsRegistry BoundsRegistry::defaults() {
  BoundsRegistry r;
  r.set(ParamKey::BreakerSwingThreshold, {5'000, 100'000});
  r.set(ParamKey::BreakerWindow, {seconds_ms(60), hours_ms(1)});
  r.set(ParamKey::BreakerCooldown, {seconds_ms(60), seconds_ms(3600)});
  r.set(ParamKey::Epsilon, {0, 1'000, true});
  r.set(ParamKey::FeeRate, {0, 10'000});
  r.set(ParamKey::DivergenceThreshold, {1'000, 50'000});
  return r;
}

std::int64_t BoundsRegistry::effective_max(ParamKey k, TokenAmount attested_reserve) const {
  const ParamBounds& b = at(k);
  if (!b.max_relative_to_reserve) return b.max;
  return static_cast<std::int64_t>(static_cast<__int128>(attested_reserve.micro) * b.max / kPpmOne);
}

bool BoundsRegistry::admits(ParamKey k, std::int64_t value, TokenAmount attested_reserve) const {
  auto it = bounds_.find(k);
  if (it == bounds_.end()) return false;
  return value >= it->second.min && value <= effective_max(k, attested_reserve);
}

ParamStore ParamStore::defaults() {
  ParamStore s;
  s.values_[ParamKey::BreakerSwingThreshold] = 20'000;
  s.values_[ParamKey::BreakerWindow] = seconds_ms(300);
  s.values_[ParamKey::BreakerCooldown] = seconds_ms(300);
  s.values_[ParamKey::Epsilon] = 0;
  s.values_[ParamKey::FeeRate] = 0;
  s.values_[ParamKey::DivergenceThreshold] = 5'000;
  return s;
}

bool ParamStore::set(ParamKey k, std::int64_t value, const BoundsRegistry& bounds, TokenAmount attested_reserve) {
  if (!bounds.admits(k, value, attested_reserve)) return false;
  values_[k] = value;
  return true;
}

}  // namespace goldsim
