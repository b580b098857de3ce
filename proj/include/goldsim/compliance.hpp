#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goldsim/sim_core.hpp"
#include "goldsim/types.hpp"

namespace goldsim {

struct UserProfile {
  Address id;
  std::string region;
  bool sanctions_match{false};
  double face_match_confidence{1.0};
  bool docs_valid{true};
  int tier{1};
};

enum class ComplianceOutcome { Approved, ManualReview, Denied };

std::string_view to_string(ComplianceOutcome o);

struct ComplianceDecision {
  ComplianceOutcome outcome{ComplianceOutcome::Approved};
  SimTime decided_at{};
  Millis processing_time{0};
  std::string reason;
  // Set for ManualReview: when staff resolve the case (always approves).
  std::optional<SimTime> review_resolved_at;
};

struct ComplianceConfig {
  double review_threshold{0.90};
  double processing_mean_ms{168'000};
  double processing_sd_ms{30'000};
  double processing_min_ms{60'000};
  Millis review_min{minutes_ms(30)};
  Millis review_max{hours_ms(2)};
  std::set<std::string> disallowed_regions{"KP", "IR", "SY", "CU"};
};

// Denied iff sanctioned, disallowed region or invalid documents; otherwise
// ManualReview iff face-match confidence is below the review threshold.
class ComplianceAgent {
 public:
  explicit ComplianceAgent(ComplianceConfig config = {}) : config_(std::move(config)) {}

  ComplianceDecision screen(const UserProfile& profile, SimTime now, RngStream& rng) const;
  const ComplianceConfig& config() const { return config_; }

 private:
  ComplianceConfig config_;
};

struct CorpusSpec {
  std::size_t clean{0};
  std::size_t low_confidence{0};
  std::size_t sanctioned{0};
  std::size_t bad_docs{0};

  std::size_t total() const { return clean + low_confidence + sanctioned + bad_docs; }
};

// Exactly the requested category mix, shuffled deterministically.
std::vector<UserProfile> generate_profiles(const CorpusSpec& spec, RngStream& rng,
                                           const ComplianceConfig& compliance = {});

}  // namespace goldsim
