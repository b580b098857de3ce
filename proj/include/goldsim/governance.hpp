#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "goldsim/params.hpp"
#include "goldsim/types.hpp"

namespace goldsim {

// --- multi-signature agent updates ---

struct AgentUpdate {
  std::string agent;
  std::string version;
};

struct MultisigProposal {
  std::uint64_t id{0};
  AgentUpdate payload;
  std::size_t signers_required{2};
  std::set<Address> signer_set;
  std::set<Address> signatures;
  bool executed{false};
};

enum class UpdateStatus { Pending, Executable, NotASigner, AlreadyExecuted };

std::string_view to_string(UpdateStatus s);

// Records a signature. The proposal flips to executed when the m-th distinct
// signer signs.
UpdateStatus sign_update(MultisigProposal& proposal, const Address& signer);

// --- time-locked parameter votes ---

enum class ProposalState { Open, Passed, Rejected, Executed, Expired };

std::string_view to_string(ProposalState s);

struct ParamProposal {
  std::uint64_t id{0};
  ParamKey key{ParamKey::BreakerSwingThreshold};
  std::int64_t new_value{0};
  Address proposer;
  SimTime proposed_at{};
  Millis voting_period{0};
  Millis timelock{0};
  Ppm quorum{400'000};
  std::int64_t votes_for{0};      // voting power, micro-OZ
  std::int64_t votes_against{0};
  std::int64_t total_power{0};
  ProposalState state{ProposalState::Open};
  std::unordered_map<Address, std::int64_t> power_snapshot;
  std::set<Address> voters;

  SimTime voting_closes() const { return proposed_at + voting_period; }
  SimTime executable_at() const { return proposed_at + timelock; }
};

// Passed iff turnout meets the quorum and votes_for strictly exceeds votes_against.
ProposalState tally(ParamProposal& proposal, std::int64_t total_power);

enum class ExecResult { Executed, TooEarly, RejectedOutOfBounds, NotPassed, Expired };

std::string_view to_string(ExecResult r);

ExecResult execute_param(ParamProposal& proposal, SimTime now, Millis grace, const BoundsRegistry& bounds,
                         ParamStore& store, TokenAmount attested_reserve);

struct GovernanceConfig {
  std::vector<Address> signers{"gov:a", "gov:b", "gov:c"};
  std::size_t signers_required{2};
  Millis timelock{hours_ms(24)};
  Millis voting_period{hours_ms(12)};
  Ppm quorum{400'000};
  Millis execution_grace{hours_ms(24 * 7)};
};

enum class VoteResult { Recorded, NoPower, AlreadyVoted, Closed, UnknownProposal };

std::string_view to_string(VoteResult r);

class Governance {
 public:
  explicit Governance(GovernanceConfig config = {}) : config_(std::move(config)) {}

  // Voting power is the holder's balance at proposal creation.
  ParamProposal& propose(ParamKey key, std::int64_t value, const Address& proposer, SimTime now,
                         const std::unordered_map<Address, TokenAmount>& balances, TokenAmount total_supply);
  VoteResult vote(std::uint64_t id, const Address& voter, bool support, SimTime now);
  // Tallies proposals whose voting window has closed; returns their ids.
  std::vector<std::uint64_t> close_voting(SimTime now);
  ExecResult execute(std::uint64_t id, SimTime now, const BoundsRegistry& bounds, ParamStore& store,
                     TokenAmount attested_reserve);

  MultisigProposal& propose_update(AgentUpdate update);
  // Unknown ids report NotASigner.
  UpdateStatus sign(std::uint64_t id, const Address& signer);

  ParamProposal* param_proposal(std::uint64_t id);
  const ParamProposal* param_proposal(std::uint64_t id) const;
  MultisigProposal* update_proposal(std::uint64_t id);
  const GovernanceConfig& config() const { return config_; }

 private:
  GovernanceConfig config_;
  std::map<std::uint64_t, ParamProposal> params_;
  std::map<std::uint64_t, MultisigProposal> updates_;
  std::uint64_t next_param_id_{1};
  std::uint64_t next_update_id_{1};
};

}  // namespace goldsim
