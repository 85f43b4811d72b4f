#include "saltbio/eam.hpp"

namespace saltbio {

std::string_view to_string(ApprovalStatus s) {
  switch (s) {
    case ApprovalStatus::approved: return "Approved";
    case ApprovalStatus::rejected: return "Rejected";
    case ApprovalStatus::pending: return "Pending";
  }
  return "Pending";
}

ApprovalStatus approval_status_from_string(std::string_view s) {
  if (s == "Approved" || s == "approved") return ApprovalStatus::approved;
  if (s == "Rejected" || s == "rejected") return ApprovalStatus::rejected;
  if (s == "Pending" || s == "pending") return ApprovalStatus::pending;
  throw Error(Errc::format, "unknown approval status: " + std::string(s));
}

std::string_view to_string(EamOp op) {
  switch (op) {
    case EamOp::update_reference: return "update";
    case EamOp::reset_references: return "reset";
    case EamOp::add_profile: return "add";
  }
  return "?";
}

std::string_view to_string(DenialReason r) {
  switch (r) {
    case DenialReason::unknown_user: return "unknown user";
    case DenialReason::wrong_password: return "wrong EAM password";
    case DenialReason::stale_code: return "stale or invalid salt code";
    case DenialReason::unapproved: return "unapproved";
  }
  return "denied";
}

EamDenied::EamDenied(DenialReason reason)
    : Error(Errc::denied, "emergency access denied: " + std::string(to_string(reason))), reason_(reason) {}

EmergencyAccess::EmergencyAccess(Authenticator& auth, std::int64_t ttl_seconds) : auth_(auth), ttl_(ttl_seconds) {
  if (ttl_ <= 0) throw Error(Errc::parameter, "EAM session TTL must be positive");
}

std::uint64_t EmergencyAccess::audit(const std::string& user, Outcome outcome, std::int64_t now,
                                     const std::string& source) {
  return auth_.log().append(AuthEvent{0, now, auth_.server_id(), user, outcome, source, true, std::nullopt});
}

EamSession EmergencyAccess::open(const std::string& user_id, std::string_view eam_password,
                                 std::string_view salt_code, std::int64_t now, const ChangeApproval& approval,
                                 const std::string& source) {
  auto deny = [&](DenialReason reason) {
    audit(user_id, Outcome::eam_denied, now, source);
    throw EamDenied(reason);
  };
  const auto rec = auth_.store().find(user_id);
  if (!rec) deny(DenialReason::unknown_user);

  bool password_ok = false;
  try {
    password_ok = ascii_digits(eam_password) == rec->eam_password_digits;
  } catch (const Error&) {
  }
  if (!password_ok) deny(DenialReason::wrong_password);

  bool code_ok = false;
  try {
    code_ok = validate(rec->device, salt_code, now, auth_.policy().skew_steps).accepted;
  } catch (const Error&) {
  }
  if (!code_ok) deny(DenialReason::stale_code);
  if (approval.status != ApprovalStatus::approved || approval.approvers.empty()) deny(DenialReason::unapproved);

  std::lock_guard lock(mu_);
  const std::uint64_t id = next_id_++;
  active_[user_id] = id;
  audit(user_id, Outcome::eam_open, now, source);
  return EamSession(id, user_id, now, now + ttl_, approval);
}

void EmergencyAccess::check(const EamSession& session, std::int64_t now) const {
  std::lock_guard lock(mu_);
  auto it = active_.find(session.user_id_);
  if (it == active_.end() || it->second != session.id_) {
    throw Error(Errc::session, "EAM session is closed or superseded");
  }
  if (now > session.expires_at_ || now < session.opened_at_) throw Error(Errc::session, "EAM session expired");
}

void EmergencyAccess::close(const EamSession& session) {
  std::lock_guard lock(mu_);
  auto it = active_.find(session.user_id_);
  if (it != active_.end() && it->second == session.id_) active_.erase(it);
}

EamAck EmergencyAccess::apply(const EamSession& session, EamOp op, EnrollmentRecord updated,
                              const EnrollmentRecord& previous, const BiometricSample& probe, std::int64_t now) {
  updated.status = AccountStatus::active;
  updated.failed_count = 0;
  auth_.store().put(updated);
  auth_.invalidate(updated.user_id);

  VerifyRequest check;
  check.user_id = updated.user_id;
  check.probe = feature_bits(probe, auth_.policy().feature_length);
  check.password_digits = updated.password_digits;
  check.salt_code = code_at(updated.device, now);
  check.unix_time = now;
  const auto result = auth_.verify(check, AuditContext{"eam-self-check", true, std::nullopt});
  if (result.outcome != Outcome::accept) {
    auth_.store().put(previous);
    auth_.invalidate(previous.user_id);
    audit(updated.user_id, Outcome::eam_failed, now, "eam:" + session.user_id_);
    throw Error(Errc::denied, "post-change login check failed (" + std::string(to_string(result.outcome)) +
                                  "); change rolled back");
  }
  const Outcome tag = op == EamOp::update_reference ? Outcome::eam_update : Outcome::eam_reset;
  const auto seq = audit(updated.user_id, tag, now, "eam:" + session.user_id_);
  return EamAck{op, updated.user_id, updated.references.size(), seq};
}

EamAck EmergencyAccess::update_reference(const EamSession& session, std::size_t index,
                                         const BiometricSample& sample, std::int64_t now) {
  check(session, now);
  const auto rec = auth_.store().find(session.user_id());
  if (!rec) throw Error(Errc::not_found, "no such user: " + session.user_id());
  if (index >= rec->references.size()) throw Error(Errc::parameter, "reference index out of range");
  EnrollmentRecord updated = *rec;
  updated.references[index] = feature_bits(sample, auth_.policy().feature_length);
  return apply(session, EamOp::update_reference, std::move(updated), *rec, sample, now);
}

EamAck EmergencyAccess::reset_references(const EamSession& session, std::span<const BiometricSample> samples,
                                         std::int64_t now) {
  check(session, now);
  if (samples.empty()) throw Error(Errc::parameter, "reset needs at least one sample");
  if (samples.size() > auth_.store().limits().max_refs) throw Error(Errc::capacity, "too many reference samples");
  const auto rec = auth_.store().find(session.user_id());
  if (!rec) throw Error(Errc::not_found, "no such user: " + session.user_id());
  EnrollmentRecord updated = *rec;
  updated.references.clear();
  for (const auto& s : samples) updated.references.push_back(feature_bits(s, auth_.policy().feature_length));
  return apply(session, EamOp::reset_references, std::move(updated), *rec, samples.front(), now);
}

EamAck EmergencyAccess::add_profile(const EamSession& session, const EnrollmentRequest& profile, std::int64_t now) {
  check(session, now);
  const std::string source = "eam:" + session.user_id();
  const auto rec = auth_.enroll(profile, now, AuditContext{source, true, std::nullopt});

  VerifyRequest probe;
  probe.user_id = rec.user_id;
  probe.probe = feature_bits(profile.samples.front(), auth_.policy().feature_length);
  probe.password_digits = rec.password_digits;
  probe.salt_code = code_at(rec.device, now);
  probe.unix_time = now;
  const auto result = auth_.verify(probe, AuditContext{"eam-self-check", true, std::nullopt});
  if (result.outcome != Outcome::accept) {
    auth_.store().erase(rec.user_id);
    auth_.invalidate(rec.user_id);
    audit(rec.user_id, Outcome::eam_failed, now, source);
    throw Error(Errc::denied, "new profile failed its login check; profile removed");
  }
  const auto seq = audit(rec.user_id, Outcome::eam_add_profile, now, source);
  return EamAck{EamOp::add_profile, rec.user_id, rec.references.size(), seq};
}

}  // namespace saltbio
