#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace goldsim {

using Millis = std::int64_t;

// Milliseconds since scenario start.
struct SimTime {
  std::int64_t ms{0};

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr double seconds() const { return static_cast<double>(ms) / 1000.0; }
};

constexpr SimTime operator+(SimTime t, Millis d) { return SimTime{t.ms + d}; }
constexpr SimTime operator-(SimTime t, Millis d) { return SimTime{t.ms - d}; }
constexpr Millis operator-(SimTime a, SimTime b) { return a.ms - b.ms; }

constexpr Millis seconds_ms(std::int64_t s) { return s * 1000; }
constexpr Millis minutes_ms(std::int64_t m) { return m * 60'000; }
constexpr Millis hours_ms(std::int64_t h) { return h * 3'600'000; }

// Token quantity in micro-OZ. All ledger arithmetic is integral.
struct TokenAmount {
  static constexpr std::int64_t kMicroPerOz = 1'000'000;

  std::int64_t micro{0};

  static constexpr TokenAmount from_micro(std::int64_t m) { return TokenAmount{m}; }
  static TokenAmount from_oz(double oz) {
    return TokenAmount{static_cast<std::int64_t>(std::llround(oz * kMicroPerOz))};
  }
  constexpr double oz() const { return static_cast<double>(micro) / kMicroPerOz; }
  constexpr bool is_zero() const { return micro == 0; }

  constexpr auto operator<=>(const TokenAmount&) const = default;
  constexpr TokenAmount operator+(TokenAmount o) const { return TokenAmount{micro + o.micro}; }
  constexpr TokenAmount operator-(TokenAmount o) const { return TokenAmount{micro - o.micro}; }
  constexpr TokenAmount operator-() const { return TokenAmount{-micro}; }
  constexpr TokenAmount& operator+=(TokenAmount o) { micro += o.micro; return *this; }
  constexpr TokenAmount& operator-=(TokenAmount o) { micro -= o.micro; return *this; }
};

// Price in micro-USD per OZ.
struct Price {
  static constexpr std::int64_t kMicroPerUsd = 1'000'000;

  std::int64_t micro_usd{0};

  static Price from_usd(double usd) {
    return Price{static_cast<std::int64_t>(std::llround(usd * kMicroPerUsd))};
  }
  constexpr double usd() const { return static_cast<double>(micro_usd) / kMicroPerUsd; }

  constexpr auto operator<=>(const Price&) const = default;
};

// Fractions stored on-chain as parts per million.
using Ppm = std::int64_t;
constexpr Ppm kPpmOne = 1'000'000;

inline Ppm fraction_to_ppm(double f) { return static_cast<Ppm>(std::llround(f * kPpmOne)); }
constexpr double ppm_to_fraction(Ppm p) { return static_cast<double>(p) / kPpmOne; }

using Address = std::string;

enum class FeedId { Primary, Secondary };

constexpr std::string_view to_string(FeedId f) {
  return f == FeedId::Primary ? "primary" : "secondary";
}

inline std::optional<FeedId> feed_from_string(std::string_view s) {
  if (s == "primary") return FeedId::Primary;
  if (s == "secondary") return FeedId::Secondary;
  return std::nullopt;
}

struct PriceSample {
  FeedId feed{FeedId::Primary};
  Price price{};
  SimTime t{};
};

// Well-known system accounts.
namespace accounts {
inline const Address kMarketMaker = "mm";
inline const Address kColdStorage = "cold";
inline const Address kAuditor = "auditor";
inline const Address kOperator = "ops";
inline const Address kRiskAgent = "risk";
inline const Address kOracle = "oracle";
inline const Address kFees = "fees";
inline const Address kExchange = "exchange";
inline const Address kIssuer = "issuer";
}  // namespace accounts

}  // namespace goldsim
