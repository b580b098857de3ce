#include "goldsim/compliance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace goldsim {

std::string_view to_string(ComplianceOutcome o) {
  switch (o) {
    case ComplianceOutcome::Approved: return "approved";
    case ComplianceOutcome::ManualReview: return "manual_review";
    case ComplianceOutcome::Denied: return "denied";
  }
  return "unknown";
}

ComplianceDecision ComplianceAgent::screen(const UserProfile& profile, SimTime now, RngStream& rng) const {
  ComplianceDecision d;
  const double drawn = std::max(config_.processing_min_ms, rng.normal(config_.processing_mean_ms, config_.processing_sd_ms));
  d.processing_time = static_cast<Millis>(std::llround(drawn));
  d.decided_at = now + d.processing_time;
  if (profile.sanctions_match) {
    d.outcome = ComplianceOutcome::Denied;
    d.reason = "sanctions match";
  } else if (config_.disallowed_regions.count(profile.region) != 0) {
    d.outcome = ComplianceOutcome::Denied;
    d.reason = "region not allowed";
  } else if (!profile.docs_valid) {
    d.outcome = ComplianceOutcome::Denied;
    d.reason = "invalid documents";
  } else if (profile.face_match_confidence < config_.review_threshold) {
    d.outcome = ComplianceOutcome::ManualReview;
    d.reason = "low-confidence face match";
    d.review_resolved_at = d.decided_at + rng.uniform_int(config_.review_min, config_.review_max);
  } else {
    d.outcome = ComplianceOutcome::Approved;
  }
  return d;
}

std::vector<UserProfile> generate_profiles(const CorpusSpec& spec, RngStream& rng,
                                           const ComplianceConfig& compliance) {
  static constexpr std::array<const char*, 6> kRegions{"US", "EU", "UK", "SG", "CH", "JP"};
  const double hi = 0.999;
  const double lo_clean = std::min(hi, compliance.review_threshold + 0.01);
  const double lo_review = std::max(0.0, compliance.review_threshold - 0.15);

  std::vector<UserProfile> out;
  out.reserve(spec.total());
  auto make = [&](double conf_lo, double conf_hi) {
    UserProfile p;
    p.region = kRegions[static_cast<std::size_t>(rng.uniform_int(0, kRegions.size() - 1))];
    p.face_match_confidence = rng.uniform(conf_lo, conf_hi);
    p.tier = 1;
    return p;
  };
  for (std::size_t i = 0; i < spec.clean; ++i) out.push_back(make(lo_clean, hi));
  for (std::size_t i = 0; i < spec.low_confidence; ++i) {
    out.push_back(make(lo_review, compliance.review_threshold - 0.01));
  }
  for (std::size_t i = 0; i < spec.sanctioned; ++i) {
    UserProfile p = make(lo_clean, hi);
    p.sanctions_match = true;
    out.push_back(p);
  }
  for (std::size_t i = 0; i < spec.bad_docs; ++i) {
    UserProfile p = make(lo_clean, hi);
    p.docs_valid = false;
    out.push_back(p);
  }
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(out[i - 1], out[j]);
  }
  char buf[32];
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::snprintf(buf, sizeof buf, "user:%05zu", i);
    out[i].id = buf;
  }
  return out;
}

}  // namespace goldsim
