#pragma once

// Random tx/attestation sequences against the ledger, checked by a shadow
// model written independently of the contract code.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "goldsim/ledger.hpp"
#include "goldsim/sim_core.hpp"

namespace goldsim::testing {

struct FuzzTotals {
  std::uint64_t sequences{0};
  std::uint64_t txs{0};
  std::uint64_t blocks{0};
  std::uint64_t accepted_mints{0};
  std::uint64_t rejected_mints{0};
  std::uint64_t ceiling_violations{0};  // accepted mints breaking supply + amount <= reserve + epsilon
  std::uint64_t sum_violations{0};      // blocks after which balances do not sum to supply
  std::uint64_t model_mismatches{0};    // receipts that disagree with the shadow model
};

namespace detail {

struct Shadow {
  std::map<Address, std::int64_t> balances;
  std::int64_t supply{0};
  std::int64_t reserve{0};
  std::int64_t epsilon{0};
  bool trading_paused{false};
  std::int64_t tripped_at{0};
  bool issuance_paused{false};
};

inline const std::vector<Address>& holders() {
  static const std::vector<Address> h{"h0", "h1", "h2", "h3", "h4"};
  return h;
}

// Expected acceptance of `tx` in the shadow, applying it when accepted.
inline bool shadow_apply(Shadow& s, const Tx& tx) {
  if (const auto* m = std::get_if<MintTx>(&tx.payload)) {
    const std::int64_t a = m->amount.micro;
    if (tx.sender != accounts::kIssuer || a <= 0) return false;
    if (s.supply + a > s.reserve + s.epsilon) return false;
    if (s.issuance_paused || s.trading_paused) return false;
    s.balances[m->to] += a;
    s.supply += a;
    return true;
  }
  if (const auto* b = std::get_if<BurnTx>(&tx.payload)) {
    const std::int64_t a = b->amount.micro;
    if (tx.sender != b->from && tx.sender != accounts::kIssuer) return false;
    if (a <= 0 || s.trading_paused || s.balances[b->from] < a) return false;
    s.balances[b->from] -= a;
    s.supply -= a;
    return true;
  }
  if (const auto* t = std::get_if<TransferTx>(&tx.payload)) {
    const std::int64_t a = t->amount.micro;
    if (tx.sender != t->from && tx.sender != accounts::kExchange) return false;
    if (a <= 0 || s.trading_paused || s.balances[t->from] < a) return false;
    s.balances[t->from] -= a;
    s.balances[t->to] += a;
    return true;
  }
  if (const auto* r = std::get_if<SetReserveTx>(&tx.payload)) {
    if (tx.sender != accounts::kAuditor || r->amount.micro < 0) return false;
    s.reserve = r->amount.micro;
    return true;
  }
  const auto& g = std::get<GovernanceTx>(tx.payload);
  if (std::holds_alternative<gov::FreezeIssuance>(g.action)) {
    if (tx.sender != accounts::kRiskAgent) return false;
    s.issuance_paused = true;
    return true;
  }
  if (std::holds_alternative<gov::ClearFreeze>(g.action)) {
    if (tx.sender != accounts::kOperator || !s.issuance_paused) return false;
    if (s.supply > s.reserve + s.epsilon) return false;
    s.issuance_paused = false;
    return true;
  }
  if (std::holds_alternative<gov::TripBreaker>(g.action)) {
    if (tx.sender != accounts::kRiskAgent) return false;
    s.trading_paused = true;
    return true;
  }
  if (std::holds_alternative<gov::Unpause>(g.action)) {
    if (tx.sender != accounts::kOperator || !s.trading_paused) return false;
    s.trading_paused = false;
    return true;
  }
  return false;
}

inline Address pick(RngStream& rng, const std::vector<Address>& from) {
  return from[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(from.size()) - 1))];
}

inline Tx random_tx(RngStream& rng, const Shadow& s) {
  const auto amount = [&]() {
    // Mostly near the headroom so the ceiling check is exercised at its edge.
    const std::int64_t headroom = s.reserve + s.epsilon - s.supply;
    switch (rng.uniform_int(0, 4)) {
      case 0: return TokenAmount{headroom};
      case 1: return TokenAmount{headroom + 1};
      case 2: return TokenAmount{rng.uniform_int(-5, 5)};
      default: return TokenAmount{rng.uniform_int(1, 50'000'000)};
    }
  };
  const Address rogue = rng.bernoulli(0.1) ? Address("mallory") : Address();
  const double u = rng.uniform();
  if (u < 0.35) {
    return Tx{rogue.empty() ? accounts::kIssuer : rogue, MintTx{pick(rng, holders()), amount(), "b"}, {}};
  }
  if (u < 0.50) {
    const Address from = pick(rng, holders());
    return Tx{rogue.empty() ? accounts::kIssuer : rogue, BurnTx{from, TokenAmount{rng.uniform_int(0, 20'000'000)}}, {}};
  }
  if (u < 0.75) {
    const Address from = pick(rng, holders());
    return Tx{rogue.empty() ? accounts::kExchange : rogue,
              TransferTx{from, pick(rng, holders()), TokenAmount{rng.uniform_int(0, 20'000'000)}}, {}};
  }
  if (u < 0.90) {
    // Attestations drift around supply, sometimes below it.
    const std::int64_t r = std::max<std::int64_t>(0, s.supply + rng.uniform_int(-10'000'000, 60'000'000));
    return Tx{rogue.empty() ? accounts::kAuditor : rogue, SetReserveTx{TokenAmount{r}}, {}};
  }
  switch (rng.uniform_int(0, 3)) {
    case 0: return Tx{accounts::kRiskAgent, GovernanceTx{gov::FreezeIssuance{"fuzz"}}, {}};
    case 1: return Tx{accounts::kOperator, GovernanceTx{gov::ClearFreeze{}}, {}};
    case 2: return Tx{accounts::kRiskAgent, GovernanceTx{gov::TripBreaker{"fuzz"}}, {}};
    default: return Tx{accounts::kOperator, GovernanceTx{gov::Unpause{}}, {}};
  }
}

}  // namespace detail

// One sequence: random genesis, then blocks of random txs. Every receipt is
// compared with the shadow model.
inline void fuzz_sequence(std::uint64_t seed, std::uint64_t index, FuzzTotals& out) {
  RngStream rng(seed, "fuzz:" + std::to_string(index));
  Scheduler scheduler;
  EventLog log(false);
  LedgerConfig config;
  config.log_level = LogLevel::Compact;
  ParamStore params = ParamStore::defaults();
  detail::Shadow s;
  s.epsilon = rng.bernoulli(0.5) ? 0 : rng.uniform_int(0, 1'000'000);
  params.set_unchecked(ParamKey::Epsilon, s.epsilon);
  Ledger ledger(scheduler, log, config, BoundsRegistry::defaults(), params);

  for (const Address& h : detail::holders()) {
    const std::int64_t b = rng.uniform_int(0, 100'000'000);
    ledger.genesis_credit(h, TokenAmount{b});
    s.balances[h] += b;
    s.supply += b;
  }
  s.reserve = s.supply + rng.uniform_int(0, 50'000'000);
  ledger.genesis_reserve(TokenAmount{s.reserve});

  const auto blocks = rng.uniform_int(1, 6);
  for (std::int64_t b = 0; b < blocks; ++b) {
    const SimTime now{(b + 1) * 1000};
    std::vector<Tx> txs;
    const auto n = rng.uniform_int(1, 8);
    for (std::int64_t i = 0; i < n; ++i) {
      txs.push_back(detail::random_tx(rng, s));
      ledger.submit_tx(txs.back());
    }

    const Block block = ledger.produce_block(now);
    ++out.blocks;
    for (std::size_t i = 0; i < block.receipts.size(); ++i) {
      const Receipt& r = block.receipts[i];
      const std::int64_t supply_before = s.supply;
      const std::int64_t ceiling = s.reserve + s.epsilon;
      const bool expected = detail::shadow_apply(s, txs[i]);
      ++out.txs;
      if (expected != r.accepted) ++out.model_mismatches;
      if (const auto* m = std::get_if<MintTx>(&txs[i].payload)) {
        if (r.accepted) {
          ++out.accepted_mints;
          if (supply_before + m->amount.micro > ceiling) ++out.ceiling_violations;
        } else {
          ++out.rejected_mints;
        }
      }
    }

    std::int64_t sum = 0;
    for (const auto& [who, bal] : ledger.state().balances) sum += bal.micro;
    if (sum != ledger.state().total_supply.micro) ++out.sum_violations;
    if (ledger.state().total_supply.micro != s.supply) ++out.model_mismatches;
  }
  ++out.sequences;
}

inline FuzzTotals fuzz_reserve(std::uint64_t seed, std::uint64_t sequences) {
  FuzzTotals t;
  for (std::uint64_t i = 0; i < sequences; ++i) fuzz_sequence(seed, i, t);
  return t;
}

}  // namespace goldsim::testing
