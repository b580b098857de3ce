#include "goldsim/governance.hpp"

namespace goldsim {

std::string_view to_string(UpdateStatus s) {
  switch (s) {
    case UpdateStatus::Pending: return "pending";
    case UpdateStatus::Executable: return "executable";
    case UpdateStatus::NotASigner: return "not_a_signer";
    case UpdateStatus::AlreadyExecuted: return "already_executed";
  }
  return "unknown";
}

std::string_view to_string(ProposalState s) {
  switch (s) {
    case ProposalState::Open: return "open";
    case ProposalState::Passed: return "passed";
    case ProposalState::Rejected: return "rejected";
    case ProposalState::Executed: return "executed";
    case ProposalState::Expired: return "expired";
  }
  return "unknown";
}

std::string_view to_string(ExecResult r) {
  switch (r) {
    case ExecResult::Executed: return "executed";
    case ExecResult::TooEarly: return "too_early";
    case ExecResult::RejectedOutOfBounds: return "rejected_out_of_bounds";
    case ExecResult::NotPassed: return "not_passed";
    case ExecResult::Expired: return "expired";
  }
  return "unknown";
}

std::string_view to_string(VoteResult r) {
  switch (r) {
    case VoteResult::Recorded: return "recorded";
    case VoteResult::NoPower: return "no_power";
    case VoteResult::AlreadyVoted: return "already_voted";
    case VoteResult::Closed: return "closed";
    case VoteResult::UnknownProposal: return "unknown_proposal";
  }
  return "unknown";
}

UpdateStatus sign_update(MultisigProposal& proposal, const Address& signer) {
  if (proposal.executed) return UpdateStatus::AlreadyExecuted;
  if (proposal.signer_set.count(signer) == 0) return UpdateStatus::NotASigner;
  proposal.signatures.insert(signer);
  if (proposal.signatures.size() >= proposal.signers_required) {
    proposal.executed = true;
    return UpdateStatus::Executable;
  }
  return UpdateStatus::Pending;
}

ProposalState tally(ParamProposal& proposal, std::int64_t total_power) {
  if (proposal.state != ProposalState::Open) return proposal.state;
  const __int128 turnout = static_cast<__int128>(proposal.votes_for) + proposal.votes_against;
  const bool quorum_met = turnout * kPpmOne >= static_cast<__int128>(proposal.quorum) * total_power;
  const bool majority = proposal.votes_for > proposal.votes_against;
  proposal.state = (quorum_met && majority) ? ProposalState::Passed : ProposalState::Rejected;
  return proposal.state;
}

ExecResult execute_param(ParamProposal& proposal, SimTime now, Millis grace, const BoundsRegistry& bounds,
                         ParamStore& store, TokenAmount attested_reserve) {
  if (proposal.state == ProposalState::Expired) return ExecResult::Expired;
  if (proposal.state != ProposalState::Passed) return ExecResult::NotPassed;
  if (now < proposal.executable_at()) return ExecResult::TooEarly;
  if (now > proposal.executable_at() + grace) {
    proposal.state = ProposalState::Expired;
    return ExecResult::Expired;
  }
  if (!store.set(proposal.key, proposal.new_value, bounds, attested_reserve)) {
    proposal.state = ProposalState::Rejected;
    return ExecResult::RejectedOutOfBounds;
  }
  proposal.state = ProposalState::Executed;
  return ExecResult::Executed;
}

ParamProposal& Governance::propose(ParamKey key, std::int64_t value, const Address& proposer, SimTime now,
                                   const std::unordered_map<Address, TokenAmount>& balances,
                                   TokenAmount total_supply) {
  ParamProposal p;
  p.id = next_param_id_++;
  p.key = key;
  p.new_value = value;
  p.proposer = proposer;
  p.proposed_at = now;
  p.voting_period = config_.voting_period;
  p.timelock = config_.timelock;
  p.quorum = config_.quorum;
  p.total_power = total_supply.micro;
  for (const auto& [addr, bal] : balances) {
    if (bal.micro > 0) p.power_snapshot.emplace(addr, bal.micro);
  }
  auto [it, _] = params_.emplace(p.id, std::move(p));
  return it->second;
}

VoteResult Governance::vote(std::uint64_t id, const Address& voter, bool support, SimTime now) {
  ParamProposal* p = param_proposal(id);
  if (p == nullptr) return VoteResult::UnknownProposal;
  if (p->state != ProposalState::Open || now >= p->voting_closes()) return VoteResult::Closed;
  if (p->voters.count(voter) != 0) return VoteResult::AlreadyVoted;
  auto it = p->power_snapshot.find(voter);
  if (it == p->power_snapshot.end()) return VoteResult::NoPower;
  p->voters.insert(voter);
  (support ? p->votes_for : p->votes_against) += it->second;
  return VoteResult::Recorded;
}

std::vector<std::uint64_t> Governance::close_voting(SimTime now) {
  std::vector<std::uint64_t> closed;
  for (auto& [id, p] : params_) {
    if (p.state == ProposalState::Open && now >= p.voting_closes()) {
      tally(p, p.total_power);
      closed.push_back(id);
    }
  }
  return closed;
}

ExecResult Governance::execute(std::uint64_t id, SimTime now, const BoundsRegistry& bounds, ParamStore& store,
                               TokenAmount attested_reserve) {
  ParamProposal* p = param_proposal(id);
  if (p == nullptr) return ExecResult::NotPassed;
  return execute_param(*p, now, config_.execution_grace, bounds, store, attested_reserve);
}

MultisigProposal& Governance::propose_update(AgentUpdate update) {
  MultisigProposal m;
  m.id = next_update_id_++;
  m.payload = std::move(update);
  m.signers_required = config_.signers_required;
  m.signer_set.insert(config_.signers.begin(), config_.signers.end());
  auto [it, _] = updates_.emplace(m.id, std::move(m));
  return it->second;
}

UpdateStatus Governance::sign(std::uint64_t id, const Address& signer) {
  MultisigProposal* m = update_proposal(id);
  if (m == nullptr) return UpdateStatus::NotASigner;
  return sign_update(*m, signer);
}

ParamProposal* Governance::param_proposal(std::uint64_t id) {
  auto it = params_.find(id);
  return it == params_.end() ? nullptr : &it->second;
}

const ParamProposal* Governance::param_proposal(std::uint64_t id) const {
  auto it = params_.find(id);
  return it == params_.end() ? nullptr : &it->second;
}

MultisigProposal* Governance::update_proposal(std::uint64_t id) {
  auto it = updates_.find(id);
  return it == updates_.end() ? nullptr : &it->second;
}

}  // namespace goldsim
