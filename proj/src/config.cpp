#include "goldsim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "goldsim/params.hpp"

namespace goldsim {

using nlohmann::ordered_json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid scenario config:";
  for (const std::string& e : errors) out += "\n  " + e;
  return out;
}

// Reads fields of one JSON object, recording type errors and, on finish(),
// any keys that were never consumed.
class Reader {
 public:
  Reader(const ordered_json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void field(const char* key, T& out) {
    const ordered_json* v = take(key);
    if (v == nullptr) return;
    convert(*v, sub(key), out);
  }

  void object(const char* key, const std::function<void(Reader&)>& body) {
    const ordered_json* v = take(key);
    if (v == nullptr) return;
    Reader r(*v, sub(key), errors_);
    if (v->is_object()) body(r);
    r.finish();
  }

  void array(const char* key, const std::function<void(const ordered_json&, const std::string&)>& each) {
    const ordered_json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_array()) {
      fail(sub(key), "expected an array");
      return;
    }
    for (std::size_t i = 0; i < v->size(); ++i) each((*v)[i], sub(key) + "[" + std::to_string(i) + "]");
  }

  // Marks the key consumed and hands back the raw value, if present.
  const ordered_json* raw(const char* key) { return take(key); }

  void finish() {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (seen_.count(it.key()) == 0) fail(sub(it.key().c_str()), "unknown key");
    }
  }

  void fail(const std::string& where, const std::string& what) { errors_.push_back(where + ": " + what); }
  std::string sub(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

 private:
  const ordered_json* take(const char* key) {
    if (!j_.is_object()) return nullptr;
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void convert(const ordered_json& v, const std::string& where, double& out) {
    if (!v.is_number()) return fail(where, "expected a number");
    out = v.get<double>();
  }
  void convert(const ordered_json& v, const std::string& where, std::int64_t& out) {
    if (!v.is_number_integer()) return fail(where, "expected an integer");
    out = v.get<std::int64_t>();
  }
  void convert(const ordered_json& v, const std::string& where, int& out) {
    if (!v.is_number_integer()) return fail(where, "expected an integer");
    out = v.get<int>();
  }
  void convert(const ordered_json& v, const std::string& where, std::uint64_t& out) {
    if (!v.is_number_unsigned()) return fail(where, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void convert(const ordered_json& v, const std::string& where, bool& out) {
    if (!v.is_boolean()) return fail(where, "expected a boolean");
    out = v.get<bool>();
  }
  void convert(const ordered_json& v, const std::string& where, std::string& out) {
    if (!v.is_string()) return fail(where, "expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  void convert(const ordered_json& v, const std::string& where, std::vector<T>& out) {
    if (!v.is_array()) return fail(where, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T item{};
      convert(v[i], where + "[" + std::to_string(i) + "]", item);
      out.push_back(item);
    }
  }
  void convert(const ordered_json& v, const std::string& where, std::set<std::string>& out) {
    std::vector<std::string> items;
    convert(v, where, items);
    out = std::set<std::string>(items.begin(), items.end());
  }

  const ordered_json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_regime(const ordered_json& j, const std::string& path, std::vector<std::string>& errors,
                 Regime& out) {
  Reader r(j, path, errors);
  std::int64_t start = 0;
  r.field("start_ms", start);
  r.field("sigma_per_s", out.sigma_per_s);
  r.field("name", out.name);
  r.finish();
  out.start = SimTime{start};
}

}  // namespace

std::string_view to_string(LogLevel l) { return l == LogLevel::Compact ? "compact" : "full"; }

ConfigInvalid::ConfigInvalid(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

ScenarioConfig parse_scenario(const ordered_json& j) {
  ScenarioConfig c;
  std::vector<std::string> errors;
  Reader root(j, "", errors);

  root.field("name", c.name);
  root.field("description", c.description);
  root.field("version", c.version);
  root.field("seed", c.seed);
  root.field("duration_ms", c.duration_ms);
  root.field("block_interval_ms", c.block_interval_ms);
  root.field("commit_latency_ms", c.commit_latency_ms);
  std::uint64_t max_tx = c.max_tx_per_block;
  root.field("max_tx_per_block", max_tx);
  c.max_tx_per_block = max_tx;
  std::string level = std::string(to_string(c.log_level));
  root.field("log_level", level);
  if (level == "compact") {
    c.log_level = LogLevel::Compact;
  } else if (level == "full") {
    c.log_level = LogLevel::Full;
  } else {
    root.fail("log_level", "expected \"compact\" or \"full\"");
  }

  root.object("users", [&](Reader& r) {
    UsersConfig& u = c.users;
    std::uint64_t count = u.count;
    r.field("count", count);
    u.count = count;
    r.field("onboarding", u.onboarding);
    r.field("onboarding_window_ms", u.onboarding_window_ms);
    r.field("initial_oz", u.initial_oz);
    r.field("think_time_mean_ms", u.think_time_mean_ms);
    r.object("action_mix", [&](Reader& m) {
      m.field("buy", u.action_mix.buy);
      m.field("sell", u.action_mix.sell);
      m.field("issue", u.action_mix.issue);
      m.field("redeem", u.action_mix.redeem);
    });
    r.object("size_lognormal", [&](Reader& s) {
      s.field("median_oz", u.size_median_oz);
      s.field("sigma", u.size_sigma);
      s.field("max_oz", u.size_max_oz);
    });
  });

  root.object("compliance", [&](Reader& r) {
    ComplianceSection& cs = c.compliance;
    r.object("corpus", [&](Reader& k) {
      std::uint64_t v;
      v = cs.corpus.clean;
      k.field("clean", v);
      cs.corpus.clean = v;
      v = cs.corpus.low_confidence;
      k.field("low_confidence", v);
      cs.corpus.low_confidence = v;
      v = cs.corpus.sanctioned;
      k.field("sanctioned", v);
      cs.corpus.sanctioned = v;
      v = cs.corpus.bad_docs;
      k.field("bad_docs", v);
      cs.corpus.bad_docs = v;
    });
    r.field("review_threshold", cs.config.review_threshold);
    r.field("processing_mean_ms", cs.config.processing_mean_ms);
    r.field("processing_sd_ms", cs.config.processing_sd_ms);
    r.field("processing_min_ms", cs.config.processing_min_ms);
    r.field("review_min_ms", cs.config.review_min);
    r.field("review_max_ms", cs.config.review_max);
    r.field("disallowed_regions", cs.config.disallowed_regions);
  });

  root.object("price_process", [&](Reader& r) {
    PriceProcessConfig& p = c.price_process;
    r.field("initial_usd", p.initial_usd);
    r.field("drift_per_s", p.drift_per_s);
    r.field("secondary_noise", p.secondary_noise);
    bool regimes_given = false;
    r.array("regimes", [&](const ordered_json& e, const std::string& path) {
      if (!regimes_given) p.regimes.clear();
      regimes_given = true;
      Regime g;
      read_regime(e, path, errors, g);
      p.regimes.push_back(g);
    });
    r.array("jumps", [&](const ordered_json& e, const std::string& path) {
      Reader jr(e, path, errors);
      std::int64_t at = 0;
      PriceJump jump;
      jr.field("t_ms", at);
      jr.field("fraction", jump.fraction);
      jr.finish();
      jump.at = SimTime{at};
      p.jumps.push_back(jump);
    });
  });

  root.object("vault", [&](Reader& r) {
    r.field("initial_oz", c.vault.initial_oz);
    r.field("attestation_interval_ms", c.vault.attestation_interval_ms);
  });

  root.object("genesis", [&](Reader& r) {
    r.field("mm_oz", c.genesis.mm_oz);
    r.field("cold_oz", c.genesis.cold_oz);
    if (const ordered_json* acc = r.raw("accounts")) {
      if (!acc->is_object()) r.fail("genesis.accounts", "expected an object");
      for (auto it = acc->begin(); acc->is_object() && it != acc->end(); ++it) {
        if (it->is_number()) {
          c.genesis.accounts[it.key()] = it->get<double>();
        } else {
          r.fail("genesis.accounts." + it.key(), "expected a number");
        }
      }
    }
  });

  root.object("ledger", [&](Reader& r) {
    r.field("epsilon_oz", c.ledger.epsilon_oz);
    r.field("breaker_swing_threshold", c.ledger.breaker_swing_threshold);
    r.field("breaker_window_ms", c.ledger.breaker_window_ms);
    r.field("breaker_cooldown_ms", c.ledger.breaker_cooldown_ms);
    r.field("fee_rate", c.ledger.fee_rate);
    r.field("divergence_threshold", c.ledger.divergence_threshold);
    r.field("snapshot_interval_ms", c.ledger.snapshot_interval_ms);
  });

  root.object("governance", [&](Reader& r) {
    GovernanceConfig& g = c.governance;
    r.field("signers", g.signers);
    std::uint64_t m = g.signers_required;
    r.field("signers_required", m);
    g.signers_required = m;
    r.field("timelock_ms", g.timelock);
    r.field("voting_period_ms", g.voting_period);
    double quorum = ppm_to_fraction(g.quorum);
    r.field("quorum", quorum);
    g.quorum = fraction_to_ppm(quorum);
    r.field("execution_grace_ms", g.execution_grace);
  });

  root.object("market_maker", [&](Reader& r) {
    MMConfig& m = c.market_maker;
    r.field("enabled", c.market_maker_enabled);
    r.field("cash_usd", c.market_maker_cash_usd);
    r.field("base_half_spread", m.base_half_spread);
    r.field("vol_coeff", m.vol_coeff);
    r.field("half_spread_cap", m.half_spread_cap);
    r.field("ladder_offsets", m.ladder_offsets);
    r.field("level_oz", m.level_oz);
    r.field("inv_limit_oz", m.inv_limit_oz);
    r.field("rebalance_threshold_oz", m.rebalance_threshold_oz);
    r.field("skew_coeff", m.skew_coeff);
    r.field("vol_window_ms", m.vol_window);
    r.field("neutral_oz", m.neutral_oz);
    r.field("rebalance_backoff_ms", m.rebalance_backoff);
  });

  root.object("risk", [&](Reader& r) {
    RiskConfig& k = c.risk;
    r.field("cycle_ms", k.cycle);
    r.field("phase_ms", k.phase);
    r.field("staleness_threshold_ms", k.staleness_threshold);
    double conc = ppm_to_fraction(k.concentration_limit);
    r.field("concentration_limit", conc);
    k.concentration_limit = fraction_to_ppm(conc);
    r.field("service_rate", k.service_rate);
    r.field("safety_ceiling", k.safety_ceiling);
    r.field("exempt_holders", k.exempt_holders);
  });

  root.object("agents", [&](Reader& r) {
    AgentTimingConfig& a = c.agents;
    r.field("processing_mean_ms", a.processing_mean_ms);
    r.field("processing_sd_ms", a.processing_sd_ms);
    r.field("processing_min_ms", a.processing_min_ms);
    r.field("routing_mean_ms", a.routing_mean_ms);
    r.field("routing_sd_ms", a.routing_sd_ms);
    r.field("routing_min_ms", a.routing_min_ms);
  });

  root.array("fault_schedule", [&](const ordered_json& e, const std::string& path) {
    Reader r(e, path, errors);
    FaultSpec f;
    r.field("target", f.target);
    r.field("feed", f.feed);
    r.field("kind", f.kind);
    r.field("start_ms", f.start_ms);
    r.field("duration_ms", f.duration_ms);
    r.field("magnitude", f.magnitude);
    r.finish();
    c.fault_schedule.push_back(f);
  });

  root.array("governance_schedule", [&](const ordered_json& e, const std::string& path) {
    Reader r(e, path, errors);
    GovernanceStep g;
    r.field("t_ms", g.t_ms);
    r.field("action", g.action);
    r.field("by", g.by);
    r.field("param", g.param);
    r.field("value", g.value);
    r.field("proposal", g.proposal);
    r.field("support", g.support);
    r.field("agent", g.agent);
    r.field("version", g.version);
    r.finish();
    c.governance_schedule.push_back(g);
  });

  root.array("scripted_actions", [&](const ordered_json& e, const std::string& path) {
    Reader r(e, path, errors);
    ScriptedAction a;
    std::string kind;
    r.field("t_ms", a.t_ms);
    r.field("action", kind);
    r.field("user", a.user);
    r.field("amount_oz", a.amount_oz);
    r.finish();
    if (auto k = workflow_from_string(kind)) {
      a.kind = *k;
    } else {
      r.fail(path + ".action", "unknown action '" + kind + "'");
    }
    c.scripted_actions.push_back(a);
  });

  root.array("bursts", [&](const ordered_json& e, const std::string& path) {
    Reader r(e, path, errors);
    Burst b;
    std::string kind;
    std::uint64_t count = 0;
    r.field("action", kind);
    r.field("count", count);
    r.field("start_ms", b.start_ms);
    r.field("duration_ms", b.duration_ms);
    r.field("amount_oz", b.amount_oz);
    r.finish();
    b.count = count;
    if (auto k = workflow_from_string(kind); k && *k != WorkflowKind::Onboard) {
      b.kind = *k;
    } else {
      r.fail(path + ".action", "unknown action '" + kind + "'");
    }
    c.bursts.push_back(b);
  });

  root.object("metrics", [&](Reader& r) { r.field("warmup_ms", c.warmup_ms); });

  if (const ordered_json* ex = root.raw("expect")) {
    if (!ex->is_object()) root.fail("expect", "expected an object");
    for (auto it = ex->begin(); ex->is_object() && it != ex->end(); ++it) {
      const ordered_json& v = *it;
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        root.fail("expect." + it.key(), "expected [min, max]");
        continue;
      }
      c.expect[it.key()] = {v[0].get<double>(), v[1].get<double>()};
    }
  }

  root.finish();

  for (std::string& e : validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigInvalid(std::move(errors));
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid({path + ": cannot open file"});
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalid({path + ": " + e.what()});
  }
  return parse_scenario(j);
}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> e;
  auto check = [&](bool ok, const std::string& field, const std::string& msg) {
    if (!ok) e.push_back(field + ": " + msg);
  };
  const Millis dur = c.duration_ms;
  auto in_run = [&](Millis t) { return t >= 0 && t <= dur; };

  check(!c.name.empty(), "name", "must be non-empty");
  check(dur > 0, "duration_ms", "must be positive");
  check(c.block_interval_ms > 0, "block_interval_ms", "must be positive");
  check(c.commit_latency_ms >= 0 && c.commit_latency_ms < c.block_interval_ms, "commit_latency_ms",
        "must lie in [0, block_interval_ms)");

  const UsersConfig& u = c.users;
  check(u.onboarding == "genesis" || u.onboarding == "screen", "users.onboarding",
        "expected \"genesis\" or \"screen\"");
  check(u.onboarding_window_ms >= 0, "users.onboarding_window_ms", "must be non-negative");
  check(u.initial_oz >= 0, "users.initial_oz", "must be non-negative");
  check(u.think_time_mean_ms >= 0, "users.think_time_mean_ms", "must be non-negative");
  const ActionMix& m = u.action_mix;
  check(m.buy >= 0 && m.sell >= 0 && m.issue >= 0 && m.redeem >= 0, "users.action_mix", "weights must be non-negative");
  check(std::abs(m.buy + m.sell + m.issue + m.redeem - 1.0) <= 1e-9, "users.action_mix", "weights must sum to 1");
  check(u.size_median_oz > 0, "users.size_lognormal.median_oz", "must be positive");
  check(u.size_sigma >= 0, "users.size_lognormal.sigma", "must be non-negative");
  check(u.size_max_oz > 0, "users.size_lognormal.max_oz", "must be positive");

  const ComplianceConfig& cc = c.compliance.config;
  check(cc.review_threshold > 0 && cc.review_threshold <= 1, "compliance.review_threshold", "must lie in (0, 1]");
  check(cc.processing_sd_ms >= 0 && cc.processing_min_ms >= 0, "compliance.processing_sd_ms",
        "timings must be non-negative");
  check(cc.review_min >= 0 && cc.review_min <= cc.review_max, "compliance.review_min_ms",
        "must satisfy 0 <= review_min_ms <= review_max_ms");

  const PriceProcessConfig& p = c.price_process;
  check(p.initial_usd > 0, "price_process.initial_usd", "must be positive");
  check(p.secondary_noise >= 0, "price_process.secondary_noise", "must be non-negative");
  for (std::size_t i = 0; i < p.regimes.size(); ++i) {
    const std::string f = "price_process.regimes[" + std::to_string(i) + "]";
    check(p.regimes[i].sigma_per_s >= 0, f + ".sigma_per_s", "must be non-negative");
    check(in_run(p.regimes[i].start.ms), f + ".start_ms", "must lie within the run");
  }
  for (std::size_t i = 0; i < p.jumps.size(); ++i) {
    const std::string f = "price_process.jumps[" + std::to_string(i) + "]";
    check(in_run(p.jumps[i].at.ms), f + ".t_ms", "must lie within the run");
    check(p.jumps[i].fraction > -1.0, f + ".fraction", "must exceed -1");
  }

  check(c.vault.initial_oz > 0, "vault.initial_oz", "must be positive");
  check(c.vault.attestation_interval_ms > 0, "vault.attestation_interval_ms", "must be positive");

  double genesis = c.genesis.mm_oz + c.genesis.cold_oz;
  check(c.genesis.mm_oz >= 0, "genesis.mm_oz", "must be non-negative");
  check(c.genesis.cold_oz >= 0, "genesis.cold_oz", "must be non-negative");
  for (const auto& [who, oz] : c.genesis.accounts) {
    check(oz >= 0, "genesis.accounts." + who, "must be non-negative");
    genesis += oz;
  }
  const std::size_t funded_users = u.onboarding == "screen" ? c.compliance.corpus.total() : u.count;
  genesis += u.initial_oz * static_cast<double>(funded_users);
  check(TokenAmount::from_oz(genesis) <= TokenAmount::from_oz(c.vault.initial_oz + c.ledger.epsilon_oz), "genesis",
        "genesis supply exceeds the vault's initial ounces");

  // Initial on-chain parameters must already satisfy the governance bounds.
  const BoundsRegistry bounds = BoundsRegistry::defaults();
  const TokenAmount reserve = TokenAmount::from_oz(c.vault.initial_oz);
  const std::pair<ParamKey, double> initial[] = {
      {ParamKey::Epsilon, c.ledger.epsilon_oz},
      {ParamKey::BreakerSwingThreshold, c.ledger.breaker_swing_threshold},
      {ParamKey::BreakerWindow, static_cast<double>(c.ledger.breaker_window_ms)},
      {ParamKey::BreakerCooldown, static_cast<double>(c.ledger.breaker_cooldown_ms)},
      {ParamKey::FeeRate, c.ledger.fee_rate},
      {ParamKey::DivergenceThreshold, c.ledger.divergence_threshold},
  };
  for (const auto& [key, value] : initial) {
    const std::string field = std::string("ledger.") + std::string(to_string(key));
    check(bounds.admits(key, param_to_stored(key, value), reserve), field, "outside governance bounds");
  }
  check(c.ledger.snapshot_interval_ms >= 0, "ledger.snapshot_interval_ms", "must be non-negative");

  const GovernanceConfig& g = c.governance;
  check(!g.signers.empty(), "governance.signers", "must be non-empty");
  check(g.signers_required >= 1 && g.signers_required <= g.signers.size(), "governance.signers_required",
        "must lie in [1, number of signers]");
  check(g.timelock >= 0, "governance.timelock_ms", "must be non-negative");
  check(g.voting_period > 0, "governance.voting_period_ms", "must be positive");
  check(g.quorum >= 0 && g.quorum <= kPpmOne, "governance.quorum", "must lie in [0, 1]");
  check(g.execution_grace >= 0, "governance.execution_grace_ms", "must be non-negative");

  const MMConfig& mm = c.market_maker;
  check(mm.base_half_spread > 0 && mm.half_spread_cap >= mm.base_half_spread, "market_maker.half_spread_cap",
        "must satisfy 0 < base_half_spread <= half_spread_cap");
  check(mm.vol_coeff >= 0, "market_maker.vol_coeff", "must be non-negative");
  check(!mm.ladder_offsets.empty(), "market_maker.ladder_offsets", "must be non-empty");
  for (std::size_t i = 0; i < mm.ladder_offsets.size(); ++i) {
    check(mm.ladder_offsets[i] > 0 && (i == 0 || mm.ladder_offsets[i] > mm.ladder_offsets[i - 1]),
          "market_maker.ladder_offsets", "must be positive and strictly increasing");
  }
  check(c.market_maker_cash_usd >= 0, "market_maker.cash_usd", "must be non-negative");
  check(mm.level_oz > 0, "market_maker.level_oz", "must be positive");
  check(mm.rebalance_threshold_oz > 0 && mm.inv_limit_oz > mm.rebalance_threshold_oz,
        "market_maker.rebalance_threshold_oz", "must satisfy 0 < rebalance_threshold_oz < inv_limit_oz");
  check(mm.skew_coeff >= 0, "market_maker.skew_coeff", "must be non-negative");
  check(mm.vol_window >= 2000, "market_maker.vol_window_ms", "must cover at least two returns");
  check(mm.neutral_oz >= 0, "market_maker.neutral_oz", "must be non-negative");
  check(mm.rebalance_backoff >= 0, "market_maker.rebalance_backoff_ms", "must be non-negative");

  const RiskConfig& r = c.risk;
  check(r.cycle > 0, "risk.cycle_ms", "must be positive");
  check(r.phase >= 0 && r.phase < r.cycle, "risk.phase_ms", "must lie in [0, cycle_ms)");
  check(r.staleness_threshold > 0, "risk.staleness_threshold_ms", "must be positive");
  check(r.concentration_limit > 0 && r.concentration_limit < kPpmOne, "risk.concentration_limit",
        "must lie in (0, 1)");
  check(r.service_rate > 0, "risk.service_rate", "must be positive");
  check(r.safety_ceiling > 0 && r.safety_ceiling <= 1, "risk.safety_ceiling", "must lie in (0, 1]");

  const AgentTimingConfig& a = c.agents;
  check(a.processing_mean_ms >= 0 && a.processing_sd_ms >= 0 && a.processing_min_ms >= 0, "agents.processing_mean_ms",
        "timings must be non-negative");
  check(a.routing_mean_ms >= 0 && a.routing_sd_ms >= 0 && a.routing_min_ms >= 0, "agents.routing_mean_ms",
        "timings must be non-negative");

  for (std::size_t i = 0; i < c.fault_schedule.size(); ++i) {
    const FaultSpec& f = c.fault_schedule[i];
    const std::string path = "fault_schedule[" + std::to_string(i) + "]";
    if (f.target == "oracle") {
      check(f.kind == "stuck" || f.kind == "spoofed", path + ".kind", "expected \"stuck\" or \"spoofed\"");
      check(feed_from_string(f.feed).has_value(), path + ".feed", "unknown feed '" + f.feed + "'");
    } else if (f.target == "vault") {
      check(f.kind == "misreport", path + ".kind", "expected \"misreport\"");
      check(f.magnitude >= 0 && f.magnitude < 1, path + ".magnitude", "shortfall must lie in [0, 1)");
    } else {
      e.push_back(path + ".target: expected \"oracle\" or \"vault\"");
    }
    check(f.start_ms >= 0, path + ".start_ms", "must be non-negative");
    check(f.duration_ms > 0, path + ".duration_ms", "must be positive");
    check(f.start_ms + f.duration_ms <= dur, path, "start_ms + duration_ms exceeds duration_ms");
  }

  static const std::set<std::string> kGovActions{"propose", "vote",         "execute", "propose_update",
                                                 "sign",    "clear_freeze", "unpause"};
  for (std::size_t i = 0; i < c.governance_schedule.size(); ++i) {
    const GovernanceStep& s = c.governance_schedule[i];
    const std::string path = "governance_schedule[" + std::to_string(i) + "]";
    check(kGovActions.count(s.action) != 0, path + ".action", "unknown action '" + s.action + "'");
    check(in_run(s.t_ms), path + ".t_ms", "must lie within the run");
    check(!s.by.empty(), path + ".by", "must be non-empty");
    if (s.action == "propose") {
      check(param_from_string(s.param).has_value(), path + ".param", "unknown parameter '" + s.param + "'");
    }
    if (s.action == "propose_update") {
      check(!s.agent.empty() && !s.version.empty(), path, "propose_update needs agent and version");
    }
  }

  for (std::size_t i = 0; i < c.scripted_actions.size(); ++i) {
    const ScriptedAction& s = c.scripted_actions[i];
    const std::string path = "scripted_actions[" + std::to_string(i) + "]";
    check(in_run(s.t_ms), path + ".t_ms", "must lie within the run");
    check(!s.user.empty(), path + ".user", "must be non-empty");
    check(s.amount_oz >= 0, path + ".amount_oz", "must be non-negative");
  }

  for (std::size_t i = 0; i < c.bursts.size(); ++i) {
    const Burst& b = c.bursts[i];
    const std::string path = "bursts[" + std::to_string(i) + "]";
    check(b.duration_ms > 0, path + ".duration_ms", "must be positive");
    check(b.start_ms >= 0 && b.start_ms + b.duration_ms <= dur, path, "must lie within the run");
    check(b.amount_oz > 0, path + ".amount_oz", "must be positive");
  }

  check(c.warmup_ms >= 0 && c.warmup_ms < dur, "metrics.warmup_ms", "must lie in [0, duration_ms)");
  for (const auto& [key, range] : c.expect) {
    check(range.first <= range.second, "expect." + key, "min exceeds max");
  }
  return e;
}

ordered_json to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["version"] = c.version;
  j["seed"] = c.seed;
  j["duration_ms"] = c.duration_ms;
  j["block_interval_ms"] = c.block_interval_ms;
  j["commit_latency_ms"] = c.commit_latency_ms;
  j["max_tx_per_block"] = c.max_tx_per_block;
  j["log_level"] = to_string(c.log_level);

  const UsersConfig& u = c.users;
  j["users"] = {{"count", u.count},
                {"onboarding", u.onboarding},
                {"onboarding_window_ms", u.onboarding_window_ms},
                {"initial_oz", u.initial_oz},
                {"think_time_mean_ms", u.think_time_mean_ms},
                {"action_mix",
                 {{"buy", u.action_mix.buy},
                  {"sell", u.action_mix.sell},
                  {"issue", u.action_mix.issue},
                  {"redeem", u.action_mix.redeem}}},
                {"size_lognormal", {{"median_oz", u.size_median_oz}, {"sigma", u.size_sigma}, {"max_oz", u.size_max_oz}}}};

  const ComplianceSection& cs = c.compliance;
  j["compliance"] = {{"corpus",
                      {{"clean", cs.corpus.clean},
                       {"low_confidence", cs.corpus.low_confidence},
                       {"sanctioned", cs.corpus.sanctioned},
                       {"bad_docs", cs.corpus.bad_docs}}},
                     {"review_threshold", cs.config.review_threshold},
                     {"processing_mean_ms", cs.config.processing_mean_ms},
                     {"processing_sd_ms", cs.config.processing_sd_ms},
                     {"processing_min_ms", cs.config.processing_min_ms},
                     {"review_min_ms", cs.config.review_min},
                     {"review_max_ms", cs.config.review_max},
                     {"disallowed_regions", cs.config.disallowed_regions}};

  ordered_json regimes = ordered_json::array();
  for (const Regime& r : c.price_process.regimes) {
    regimes.push_back({{"start_ms", r.start.ms}, {"sigma_per_s", r.sigma_per_s}, {"name", r.name}});
  }
  ordered_json jumps = ordered_json::array();
  for (const PriceJump& p : c.price_process.jumps) jumps.push_back({{"t_ms", p.at.ms}, {"fraction", p.fraction}});
  j["price_process"] = {{"initial_usd", c.price_process.initial_usd},
                        {"drift_per_s", c.price_process.drift_per_s},
                        {"secondary_noise", c.price_process.secondary_noise},
                        {"regimes", regimes},
                        {"jumps", jumps}};

  j["vault"] = {{"initial_oz", c.vault.initial_oz}, {"attestation_interval_ms", c.vault.attestation_interval_ms}};
  ordered_json accounts = ordered_json::object();
  for (const auto& [who, oz] : c.genesis.accounts) accounts[who] = oz;
  j["genesis"] = {{"mm_oz", c.genesis.mm_oz}, {"cold_oz", c.genesis.cold_oz}, {"accounts", accounts}};
  j["ledger"] = {{"epsilon_oz", c.ledger.epsilon_oz},
                 {"breaker_swing_threshold", c.ledger.breaker_swing_threshold},
                 {"breaker_window_ms", c.ledger.breaker_window_ms},
                 {"breaker_cooldown_ms", c.ledger.breaker_cooldown_ms},
                 {"fee_rate", c.ledger.fee_rate},
                 {"divergence_threshold", c.ledger.divergence_threshold},
                 {"snapshot_interval_ms", c.ledger.snapshot_interval_ms}};
  j["governance"] = {{"signers", c.governance.signers},
                     {"signers_required", c.governance.signers_required},
                     {"timelock_ms", c.governance.timelock},
                     {"voting_period_ms", c.governance.voting_period},
                     {"quorum", ppm_to_fraction(c.governance.quorum)},
                     {"execution_grace_ms", c.governance.execution_grace}};
  const MMConfig& mm = c.market_maker;
  j["market_maker"] = {{"enabled", c.market_maker_enabled},
                       {"cash_usd", c.market_maker_cash_usd},
                       {"base_half_spread", mm.base_half_spread},
                       {"vol_coeff", mm.vol_coeff},
                       {"half_spread_cap", mm.half_spread_cap},
                       {"ladder_offsets", mm.ladder_offsets},
                       {"level_oz", mm.level_oz},
                       {"inv_limit_oz", mm.inv_limit_oz},
                       {"rebalance_threshold_oz", mm.rebalance_threshold_oz},
                       {"skew_coeff", mm.skew_coeff},
                       {"vol_window_ms", mm.vol_window},
                       {"neutral_oz", mm.neutral_oz},
                       {"rebalance_backoff_ms", mm.rebalance_backoff}};
  const RiskConfig& r = c.risk;
  j["risk"] = {{"cycle_ms", r.cycle},
               {"phase_ms", r.phase},
               {"staleness_threshold_ms", r.staleness_threshold},
               {"concentration_limit", ppm_to_fraction(r.concentration_limit)},
               {"service_rate", r.service_rate},
               {"safety_ceiling", r.safety_ceiling},
               {"exempt_holders", r.exempt_holders}};
  const AgentTimingConfig& a = c.agents;
  j["agents"] = {{"processing_mean_ms", a.processing_mean_ms}, {"processing_sd_ms", a.processing_sd_ms},
                 {"processing_min_ms", a.processing_min_ms},   {"routing_mean_ms", a.routing_mean_ms},
                 {"routing_sd_ms", a.routing_sd_ms},           {"routing_min_ms", a.routing_min_ms}};

  ordered_json faults = ordered_json::array();
  for (const FaultSpec& f : c.fault_schedule) {
    faults.push_back({{"target", f.target},
                      {"feed", f.feed},
                      {"kind", f.kind},
                      {"start_ms", f.start_ms},
                      {"duration_ms", f.duration_ms},
                      {"magnitude", f.magnitude}});
  }
  j["fault_schedule"] = faults;

  ordered_json gov = ordered_json::array();
  for (const GovernanceStep& s : c.governance_schedule) {
    ordered_json e{{"t_ms", s.t_ms}, {"action", s.action}, {"by", s.by}};
    if (!s.param.empty()) e["param"] = s.param;
    if (s.action == "propose") e["value"] = s.value;
    if (s.proposal != 0) e["proposal"] = s.proposal;
    if (s.action == "vote") e["support"] = s.support;
    if (!s.agent.empty()) e["agent"] = s.agent;
    if (!s.version.empty()) e["version"] = s.version;
    gov.push_back(e);
  }
  j["governance_schedule"] = gov;

  ordered_json scripted = ordered_json::array();
  for (const ScriptedAction& s : c.scripted_actions) {
    scripted.push_back({{"t_ms", s.t_ms}, {"action", to_string(s.kind)}, {"user", s.user}, {"amount_oz", s.amount_oz}});
  }
  j["scripted_actions"] = scripted;

  ordered_json bursts = ordered_json::array();
  for (const Burst& b : c.bursts) {
    bursts.push_back({{"action", to_string(b.kind)},
                      {"count", b.count},
                      {"start_ms", b.start_ms},
                      {"duration_ms", b.duration_ms},
                      {"amount_oz", b.amount_oz}});
  }
  j["bursts"] = bursts;
  j["metrics"] = {{"warmup_ms", c.warmup_ms}};
  ordered_json expect = ordered_json::object();
  for (const auto& [key, range] : c.expect) expect[key] = {range.first, range.second};
  j["expect"] = expect;
  return j;
}

}  // namespace goldsim
