#include "goldsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace goldsim {

PriceProcess::PriceProcess(PriceProcessConfig config)
    : config_(std::move(config)), log_price_(std::log(config_.initial_usd)), price_(config_.initial_usd) {
  std::stable_sort(config_.regimes.begin(), config_.regimes.end(),
                   [](const Regime& a, const Regime& b) { return a.start < b.start; });
  std::stable_sort(config_.jumps.begin(), config_.jumps.end(),
                   [](const PriceJump& a, const PriceJump& b) { return a.at < b.at; });
  if (config_.regimes.empty() || config_.regimes.front().start > SimTime{0}) {
    config_.regimes.insert(config_.regimes.begin(), Regime{SimTime{0}, 0.0, "flat"});
  }
}

const Regime& PriceProcess::regime_at(SimTime t) const {
  auto it = std::upper_bound(config_.regimes.begin(), config_.regimes.end(), t,
                             [](SimTime v, const Regime& r) { return v < r.start; });
  return *std::prev(it);
}

double PriceProcess::step(SimTime now, RngStream& rng) {
  // One normal draw per step regardless of sigma keeps paths aligned across regimes.
  const double z = rng.normal();
  log_price_ += config_.drift_per_s + regime_at(now).sigma_per_s * z;
  while (next_jump_ < config_.jumps.size() && config_.jumps[next_jump_].at <= now) {
    log_price_ += std::log1p(config_.jumps[next_jump_].fraction);
    ++next_jump_;
  }
  price_ = std::exp(log_price_);
  return price_;
}

std::string_view fault_name(const FeedFault& f) {
  if (std::holds_alternative<Stuck>(f)) return "stuck";
  if (std::holds_alternative<Spoofed>(f)) return "spoofed";
  return "none";
}

std::string_view to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::None: return "none";
    case OracleStatus::Stale: return "stale";
    case OracleStatus::Diverged: return "diverged";
  }
  return "unknown";
}

OracleStatus detect_divergence(const FeedState& primary, const FeedState& secondary, SimTime now,
                               Millis staleness, Ppm divergence) {
  // A feed that has never published counts from t = 0.
  const SimTime last = primary.last ? primary.last->t : SimTime{0};
  if (now - last >= staleness) return OracleStatus::Stale;
  if (!primary.last || !secondary.last) return OracleStatus::None;
  const std::int64_t pp = primary.last->price.micro_usd;
  const std::int64_t ps = secondary.last->price.micro_usd;
  const __int128 lhs = static_cast<__int128>(std::llabs(pp - ps)) * kPpmOne;
  const __int128 rhs = static_cast<__int128>(divergence) * ps;
  return lhs > rhs ? OracleStatus::Diverged : OracleStatus::None;
}

FeedId parse_feed(std::string_view name) {
  if (auto f = feed_from_string(name)) return *f;
  throw UnknownFeed("unknown feed '" + std::string(name) + "'");
}

Oracle::Oracle(PriceProcessConfig config, std::uint64_t seed)
    : process_(std::move(config)), price_rng_(seed, "price"), noise_rng_(seed, "secondary_noise") {}

void Oracle::inject_fault(FeedId feed, FaultKind kind, double offset, SimTime at, Millis duration) {
  schedule_.push_back(ScheduledFeedFault{feed, kind, offset, at, duration});
}

void Oracle::restore(FeedId feed) {
  mutable_feed(feed).fault = NoFault{};
  std::erase_if(schedule_, [feed](const ScheduledFeedFault& s) { return s.feed == feed; });
}

void Oracle::refresh_faults(SimTime now) {
  for (FeedId id : {FeedId::Primary, FeedId::Secondary}) {
    FeedState& fs = mutable_feed(id);
    FeedFault next = NoFault{};
    for (const ScheduledFeedFault& s : schedule_) {
      if (s.feed != id || now < s.start || now >= s.start + s.duration) continue;
      if (s.kind == FaultKind::Stuck) {
        next = Stuck{s.start};
      } else {
        next = Spoofed{s.offset, s.start};
      }
    }
    fs.fault = next;
  }
}

std::vector<PriceSample> Oracle::publish(SimTime now) {
  const double truth = process_.step(now, price_rng_);
  const double noise = noise_rng_.normal() * process_.config().secondary_noise;
  refresh_faults(now);

  std::vector<PriceSample> out;
  for (FeedId id : {FeedId::Primary, FeedId::Secondary}) {
    FeedState& fs = mutable_feed(id);
    if (std::holds_alternative<Stuck>(fs.fault)) continue;
    double p = id == FeedId::Primary ? truth : truth * (1.0 + noise);
    if (const auto* sp = std::get_if<Spoofed>(&fs.fault)) p *= 1.0 + sp->offset;
    fs.last = PriceSample{id, Price::from_usd(p), now};
    out.push_back(*fs.last);
  }
  return out;
}

}  // namespace goldsim
