#include "goldsim/vault.hpp"

#include <cmath>

namespace goldsim {

Vault::Vault(TokenAmount initial, Address auditor) : auditor_(std::move(auditor)), total_(initial) {}

LockTicket Vault::lock(TokenAmount amount, LockPurpose purpose) {
  if (amount.micro <= 0) throw VaultError(VaultErrorCode::InvalidAmount, "lock amount must be positive");
  if (unlocked() < amount) {
    throw VaultError(VaultErrorCode::InsufficientUnlocked, "insufficient unlocked ounces");
  }
  LockTicket t{next_ticket_++, amount, purpose};
  locked_ += amount;
  tickets_.emplace(t.id, t);
  return t;
}

LockTicket Vault::lock_for_issuance(TokenAmount amount) { return lock(amount, LockPurpose::Issuance); }

LockTicket Vault::lock_for_redemption(TokenAmount amount) { return lock(amount, LockPurpose::Redemption); }

bool Vault::release(const LockTicket& ticket) {
  auto it = tickets_.find(ticket.id);
  if (it == tickets_.end()) return false;
  locked_ -= it->second.amount;
  tickets_.erase(it);
  return true;
}

bool Vault::commit_issuance(const LockTicket& ticket) {
  auto it = tickets_.find(ticket.id);
  if (it == tickets_.end() || it->second.purpose != LockPurpose::Issuance) return false;
  allocated_ += it->second.amount;
  return release(ticket);
}

void Vault::withdraw_physical(const LockTicket& ticket) {
  auto it = tickets_.find(ticket.id);
  if (it == tickets_.end() || it->second.purpose != LockPurpose::Redemption) {
    throw VaultError(VaultErrorCode::UncoveredWithdrawal, "withdrawal without a redemption ticket");
  }
  const TokenAmount amount = it->second.amount;
  locked_ -= amount;
  total_ -= amount;
  allocated_ -= amount;
  tickets_.erase(it);
}

void Vault::deposit_physical(TokenAmount amount) {
  if (amount.micro <= 0) throw VaultError(VaultErrorCode::InvalidAmount, "deposit amount must be positive");
  total_ += amount;
}

void Vault::inject_misreport(double shortfall, SimTime at, Millis duration) {
  faults_.push_back(Misreport{shortfall, at, duration});
}

const Misreport* Vault::active_fault(SimTime now) const {
  const Misreport* active = nullptr;
  for (const Misreport& m : faults_) {
    if (now >= m.start && now < m.start + m.duration) active = &m;
  }
  return active;
}

Attestation Vault::issue_attestation(SimTime now) {
  TokenAmount reported = total_;
  if (const Misreport* m = active_fault(now)) {
    reported = TokenAmount{static_cast<std::int64_t>(std::llround(static_cast<double>(total_.micro) * (1.0 - m->shortfall)))};
  }
  attestations_.push_back(Attestation{reported, now, auditor_});
  return attestations_.back();
}

}  // namespace goldsim
