#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "goldsim/sim_core.hpp"
#include "goldsim/types.hpp"

namespace goldsim {

struct Regime {
  SimTime start{};
  double sigma_per_s{0.0};
  std::string name;
};

// A one-off multiplicative shock applied to the true price at the first step
// at or after `at`.
struct PriceJump {
  SimTime at{};
  double fraction{0.0};
};

struct PriceProcessConfig {
  double initial_usd{2400.0};
  double drift_per_s{0.0};
  std::vector<Regime> regimes{{SimTime{0}, 5e-5, "stable"}};
  std::vector<PriceJump> jumps;
  double secondary_noise{0.0002};
};

// Geometric random walk with piecewise-constant volatility, stepped once per
// simulated second.
class PriceProcess {
 public:
  explicit PriceProcess(PriceProcessConfig config);

  double step(SimTime now, RngStream& rng);
  double current() const { return price_; }
  const Regime& regime_at(SimTime t) const;
  const PriceProcessConfig& config() const { return config_; }

 private:
  PriceProcessConfig config_;
  double log_price_;
  double price_;
  std::size_t next_jump_{0};
};

struct NoFault {};
struct Stuck {
  SimTime since{};
};
struct Spoofed {
  double offset{0.0};
  SimTime since{};
};
using FeedFault = std::variant<NoFault, Stuck, Spoofed>;

std::string_view fault_name(const FeedFault& f);

struct FeedState {
  FeedId id{FeedId::Primary};
  std::optional<PriceSample> last;
  FeedFault fault{NoFault{}};
};

enum class OracleStatus { None, Stale, Diverged };

std::string_view to_string(OracleStatus s);

// Stale if the primary has not published for `staleness`; Diverged if the
// two feeds disagree by more than `divergence` (ppm). Stale takes precedence.
OracleStatus detect_divergence(const FeedState& primary, const FeedState& secondary, SimTime now,
                               Millis staleness, Ppm divergence);

class UnknownFeed : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

FeedId parse_feed(std::string_view name);  // throws UnknownFeed

enum class FaultKind { Stuck, Spoofed };

struct ScheduledFeedFault {
  FeedId feed{FeedId::Primary};
  FaultKind kind{FaultKind::Stuck};
  double offset{0.0};
  SimTime start{};
  Millis duration{0};
};

// Two feeds over one true price. Faults are held as a schedule and become
// active for [start, start + duration) at publish time.
class Oracle {
 public:
  Oracle(PriceProcessConfig config, std::uint64_t seed);

  // Steps the true price and returns the samples each non-stuck feed publishes.
  std::vector<PriceSample> publish(SimTime now);

  void inject_fault(FeedId feed, FaultKind kind, double offset, SimTime at, Millis duration);
  void inject_fault(std::string_view feed, FaultKind kind, double offset, SimTime at, Millis duration) {
    inject_fault(parse_feed(feed), kind, offset, at, duration);
  }
  // Clears the active fault and any scheduled faults on the feed.
  void restore(FeedId feed);

  const FeedState& feed(FeedId f) const { return f == FeedId::Primary ? primary_ : secondary_; }
  double true_price() const { return process_.current(); }
  const PriceProcess& process() const { return process_; }

  // The feed downstream consumers read; the risk agent switches it on faults.
  FeedId consumer_feed() const { return consumer_feed_; }
  void set_consumer_feed(FeedId f) { consumer_feed_ = f; }
  std::optional<PriceSample> consumer_price() const { return feed(consumer_feed_).last; }

 private:
  FeedState& mutable_feed(FeedId f) { return f == FeedId::Primary ? primary_ : secondary_; }
  void refresh_faults(SimTime now);

  PriceProcess process_;
  RngStream price_rng_;
  RngStream noise_rng_;
  FeedState primary_{FeedId::Primary, std::nullopt, NoFault{}};
  FeedState secondary_{FeedId::Secondary, std::nullopt, NoFault{}};
  std::vector<ScheduledFeedFault> schedule_;
  FeedId consumer_feed_{FeedId::Primary};
};

}  // namespace goldsim
