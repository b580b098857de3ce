#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "goldsim/types.hpp"

namespace goldsim {

struct Attestation {
  TokenAmount reported_oz{};
  SimTime t{};
  Address auditor;
};

struct Misreport {
  double shortfall{0.0};
  SimTime start{};
  Millis duration{0};
};

enum class LockPurpose { Issuance, Redemption };

struct LockTicket {
  std::uint64_t id{0};
  TokenAmount amount{};
  LockPurpose purpose{LockPurpose::Issuance};
};

enum class VaultErrorCode { InsufficientUnlocked, UncoveredWithdrawal, InvalidAmount };

class VaultError : public std::runtime_error {
 public:
  VaultError(VaultErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  VaultErrorCode code() const { return code_; }

 private:
  VaultErrorCode code_;
};

// Physical custody. Invariant: 0 <= locked <= total. `allocated` is the
// backing assigned to tokens in circulation and tracks on-chain supply.
class Vault {
 public:
  explicit Vault(TokenAmount initial, Address auditor = accounts::kAuditor);

  LockTicket lock_for_issuance(TokenAmount amount);
  LockTicket lock_for_redemption(TokenAmount amount);
  // Returns false for unknown or already-released tickets.
  bool release(const LockTicket& ticket);
  // Marks an issuance lock as backing minted tokens and releases it.
  bool commit_issuance(const LockTicket& ticket);
  // Consumes a redemption ticket and removes the ounces from custody.
  void withdraw_physical(const LockTicket& ticket);
  void deposit_physical(TokenAmount amount);

  // Genesis supply backed before the run starts.
  void assign_backing(TokenAmount amount) { allocated_ += amount; }

  Attestation issue_attestation(SimTime now);
  void inject_misreport(double shortfall, SimTime at, Millis duration);
  void restore() { faults_.clear(); }
  const Misreport* active_fault(SimTime now) const;

  TokenAmount total() const { return total_; }
  TokenAmount locked() const { return locked_; }
  TokenAmount unlocked() const { return total_ - locked_; }
  TokenAmount allocated() const { return allocated_; }
  // Ounces neither backing tokens nor locked for in-flight work.
  TokenAmount available() const { return total_ - allocated_ - locked_; }
  std::size_t open_tickets() const { return tickets_.size(); }
  const std::vector<Attestation>& attestations() const { return attestations_; }

 private:
  LockTicket lock(TokenAmount amount, LockPurpose purpose);

  Address auditor_;
  TokenAmount total_;
  TokenAmount locked_{};
  TokenAmount allocated_{};
  std::map<std::uint64_t, LockTicket> tickets_;
  std::uint64_t next_ticket_{1};
  std::vector<Misreport> faults_;
  std::vector<Attestation> attestations_;
};

}  // namespace goldsim
