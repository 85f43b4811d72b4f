#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saltbio/auth_core.hpp"
#include "saltbio/biometric.hpp"
#include "saltbio/error.hpp"

namespace saltbio {

enum class ApprovalStatus : std::uint8_t { approved, rejected, pending };

std::string_view to_string(ApprovalStatus s);
ApprovalStatus approval_status_from_string(std::string_view s);

/// Minimal change-management record gating emergency access.
struct ChangeApproval {
  std::string change_id;
  std::vector<std::string> approvers;
  ApprovalStatus status = ApprovalStatus::pending;
};

enum class EamOp : std::uint8_t { update_reference, reset_references, add_profile };

std::string_view to_string(EamOp op);

inline constexpr std::array<EamOp, 3> kEamAllowedOps = {EamOp::update_reference, EamOp::reset_references,
                                                        EamOp::add_profile};

/// Handle for an open emergency session. Only EmergencyAccess can mint one.
class EamSession {
 public:
  const std::string& user_id() const noexcept { return user_id_; }
  std::int64_t opened_at() const noexcept { return opened_at_; }
  std::int64_t expires_at() const noexcept { return expires_at_; }
  const ChangeApproval& approval() const noexcept { return approval_; }
  static constexpr std::span<const EamOp> allowed_ops() noexcept { return kEamAllowedOps; }

 private:
  friend class EmergencyAccess;
  EamSession(std::uint64_t id, std::string user_id, std::int64_t opened_at, std::int64_t expires_at,
             ChangeApproval approval)
      : id_(id),
        user_id_(std::move(user_id)),
        opened_at_(opened_at),
        expires_at_(expires_at),
        approval_(std::move(approval)) {}

  std::uint64_t id_;
  std::string user_id_;
  std::int64_t opened_at_;
  std::int64_t expires_at_;
  ChangeApproval approval_;
};

enum class DenialReason : std::uint8_t { unknown_user, wrong_password, stale_code, unapproved };

std::string_view to_string(DenialReason r);

class EamDenied : public Error {
 public:
  explicit EamDenied(DenialReason reason);

  DenialReason reason() const noexcept { return reason_; }

 private:
  DenialReason reason_;
};

/// Operation acknowledgment; stored templates never leave the store.
struct EamAck {
  EamOp op;
  std::string user_id;
  std::size_t reference_count = 0;
  std::uint64_t audit_seq = 0;
};

/// Emergency access mode: a gated session that can only replace or reset
/// biometric references and add a new profile. Each change is followed by a
/// full login with the new reference; if that login is not accepted the
/// change is rolled back and the operation fails.
class EmergencyAccess {
 public:
  explicit EmergencyAccess(Authenticator& auth, std::int64_t ttl_seconds = 600);

  /// Throws EamDenied (audited) on a wrong EAM password, a code outside the
  /// window, a non-approved change or an unknown user. Opening a session
  /// supersedes any earlier one for the same user.
  EamSession open(const std::string& user_id, std::string_view eam_password, std::string_view salt_code,
                  std::int64_t now, const ChangeApproval& approval, const std::string& source = "console");

  EamAck update_reference(const EamSession& session, std::size_t index, const BiometricSample& sample,
                          std::int64_t now);
  EamAck reset_references(const EamSession& session, std::span<const BiometricSample> samples, std::int64_t now);
  EamAck add_profile(const EamSession& session, const EnrollmentRequest& profile, std::int64_t now);

  void close(const EamSession& session);

 private:
  void check(const EamSession& session, std::int64_t now) const;
  EamAck apply(const EamSession& session, EamOp op, EnrollmentRecord updated, const EnrollmentRecord& previous,
               const BiometricSample& probe, std::int64_t now);
  std::uint64_t audit(const std::string& user, Outcome outcome, std::int64_t now, const std::string& source);

  Authenticator& auth_;
  std::int64_t ttl_;
  mutable std::mutex mu_;
  std::uint64_t next_id_ = 1;
  std::map<std::string, std::uint64_t> active_;
};

}  // namespace saltbio
