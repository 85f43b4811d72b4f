#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "saltbio/eam.hpp"

using namespace saltbio;
using fixtures::Rig;

namespace {

constexpr std::int64_t kT0 = 60LL * 28333333;

ChangeApproval approved() { return {"CHG-1001", {"ops-lead"}, ApprovalStatus::approved}; }

struct EamRig {
  EamRig() : eam(rig.auth, 600) {
    std::mt19937_64 rng(31);
    old_sample = fixtures::clean_tail_sample(rng);
    new_sample = fixtures::clean_tail_sample(rng);
    rec = rig.auth.enroll(fixtures::request("alice", {old_sample}), kT0);
  }
  std::string code(std::int64_t t) const { return code_at(rec.device, t); }

  Rig rig;
  EmergencyAccess eam;
  BiometricSample old_sample;
  BiometricSample new_sample;
  EnrollmentRecord rec;
};

DenialReason denial(auto&& fn) {
  try {
    fn();
  } catch (const EamDenied& e) {
    CHECK(e.code() == Errc::denied);
    return e.reason();
  }
  FAIL("expected EamDenied");
  return DenialReason::unapproved;
}

}  // namespace

TEST_CASE("opening requires password, fresh code and an approved change") {
  EamRig r;
  const std::int64_t t = kT0 + 10;
  CHECK(denial([&] { r.eam.open("nobody", "break-glass", r.code(t), t, approved()); }) == DenialReason::unknown_user);
  CHECK(denial([&] { r.eam.open("alice", "crisopher2101", r.code(t), t, approved()); }) ==
        DenialReason::wrong_password);
  CHECK(denial([&] { r.eam.open("alice", "break-glass", r.code(t - 600), t, approved()); }) ==
        DenialReason::stale_code);
  CHECK(denial([&] { r.eam.open("alice", "break-glass", "abc", t, approved()); }) == DenialReason::stale_code);
  ChangeApproval pending{"CHG-1", {"x"}, ApprovalStatus::pending};
  CHECK(denial([&] { r.eam.open("alice", "break-glass", r.code(t), t, pending); }) == DenialReason::unapproved);
  ChangeApproval nobody{"CHG-2", {}, ApprovalStatus::approved};
  CHECK(denial([&] { r.eam.open("alice", "break-glass", r.code(t), t, nobody); }) == DenialReason::unapproved);

  const auto before = r.rig.log.size();
  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  CHECK(s.user_id() == "alice");
  CHECK(s.expires_at() == t + 600);
  CHECK(s.approval().change_id == "CHG-1001");
  CHECK(r.rig.log.size() == before + 1);
  CHECK(r.rig.log.events().back().outcome == Outcome::eam_open);

  for (const auto& e : r.rig.log.events()) {
    if (e.outcome == Outcome::eam_denied || e.outcome == Outcome::eam_open) CHECK(e.is_eam);
  }
  int denied = 0;
  for (const auto& e : r.rig.log.events()) denied += e.outcome == Outcome::eam_denied;
  CHECK(denied == 6);
}

TEST_CASE("only the three change operations exist") {
  CHECK(EamSession::allowed_ops().size() == 3);
  CHECK(to_string(EamSession::allowed_ops()[0]) == "update");
  CHECK(to_string(EamSession::allowed_ops()[1]) == "reset");
  CHECK(to_string(EamSession::allowed_ops()[2]) == "add");
}

TEST_CASE("updating a reference lets the new sample in") {
  EamRig r;
  std::int64_t t = kT0 + 5;
  CHECK(r.rig.auth.login("alice", r.new_sample, "crisopher2101", r.code(t), t).outcome == Outcome::reject_biometric);
  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  const auto ack = r.eam.update_reference(s, 0, r.new_sample, t);
  CHECK(ack.op == EamOp::update_reference);
  CHECK(ack.reference_count == 1);
  CHECK(r.rig.log.events().back().outcome == Outcome::eam_update);
  CHECK(r.rig.log.events().back().seq == ack.audit_seq);
  t += 30;
  CHECK(r.rig.auth.login("alice", r.new_sample, "crisopher2101", r.code(t), t).outcome == Outcome::accept);
  CHECK(r.rig.auth.login("alice", r.old_sample, "crisopher2101", r.code(t), t).outcome == Outcome::reject_biometric);
  CHECK_THROWS_AS(r.eam.update_reference(s, 3, r.new_sample, t), Error);
}

TEST_CASE("a locked user regains access through an update") {
  EamRig r;
  std::int64_t t = kT0 + 1;
  for (int i = 0; i < 3; ++i) r.rig.auth.login("alice", r.new_sample, "crisopher2101", r.code(t), t);
  CHECK(r.rig.store.find("alice")->status == AccountStatus::locked);
  CHECK(r.rig.auth.login("alice", r.old_sample, "crisopher2101", r.code(t), t).outcome == Outcome::locked_out);

  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  r.eam.update_reference(s, 0, r.new_sample, t);
  CHECK(r.rig.store.find("alice")->status == AccountStatus::active);
  CHECK(r.rig.store.find("alice")->failed_count == 0);
  CHECK(r.rig.auth.login("alice", r.new_sample, "crisopher2101", r.code(t), t).outcome == Outcome::accept);
}

TEST_CASE("reset replaces every reference") {
  EamRig r;
  std::mt19937_64 rng(2);
  const auto third = fixtures::clean_tail_sample(rng);
  const std::int64_t t = kT0 + 2;
  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  const std::vector<BiometricSample> fresh = {r.new_sample, third};
  const auto ack = r.eam.reset_references(s, fresh, t);
  CHECK(ack.reference_count == 2);
  CHECK(r.rig.log.events().back().outcome == Outcome::eam_reset);
  CHECK(r.rig.auth.login("alice", third, "crisopher2101", r.code(t), t).outcome == Outcome::accept);
  CHECK(r.rig.auth.login("alice", r.old_sample, "crisopher2101", r.code(t), t).outcome ==
        Outcome::reject_biometric);
  CHECK_THROWS_AS(r.eam.reset_references(s, std::vector<BiometricSample>{}, t), Error);
}

TEST_CASE("adding a profile enrolls and verifies it") {
  EamRig r;
  const std::int64_t t = kT0 + 3;
  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  auto profile = fixtures::request("bob", {r.new_sample}, 0xB0B);
  const auto ack = r.eam.add_profile(s, profile, t);
  CHECK(ack.op == EamOp::add_profile);
  CHECK(ack.user_id == "bob");
  CHECK(r.rig.store.contains("bob"));
  CHECK(r.rig.log.events().back().outcome == Outcome::eam_add_profile);
  const auto bob = *r.rig.store.find("bob");
  CHECK(r.rig.auth.login("bob", r.new_sample, "crisopher2101", code_at(bob.device, t), t).outcome == Outcome::accept);
  CHECK_THROWS_AS(r.eam.add_profile(s, profile, t), Error);
}

TEST_CASE("sessions expire and are superseded") {
  EamRig r;
  const std::int64_t t = kT0 + 4;
  const auto s1 = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  try {
    r.eam.update_reference(s1, 0, r.new_sample, t + 601);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::session);
  }
  const auto s2 = r.eam.open("alice", "break-glass", r.code(t + 5), t + 5, approved());
  CHECK_THROWS_AS(r.eam.update_reference(s1, 0, r.new_sample, t + 5), Error);
  CHECK_NOTHROW(r.eam.update_reference(s2, 0, r.new_sample, t + 5));
  r.eam.close(s2);
  CHECK_THROWS_AS(r.eam.update_reference(s2, 0, r.old_sample, t + 6), Error);
}

TEST_CASE("EAM activity is flagged in the audit log") {
  EamRig r;
  const std::int64_t t = kT0 + 7;
  const auto s = r.eam.open("alice", "break-glass", r.code(t), t, approved());
  r.eam.update_reference(s, 0, r.new_sample, t);
  r.rig.auth.login("alice", r.new_sample, "crisopher2101", r.code(t), t);
  const auto events = r.rig.log.events();
  // enroll, open, self-check accept, update, then one ordinary login
  REQUIRE(events.size() == 5);
  CHECK_FALSE(events[0].is_eam);
  CHECK(events[1].is_eam);
  CHECK(events[2].is_eam);
  CHECK(events[2].source == "eam-self-check");
  CHECK(events[3].is_eam);
  CHECK_FALSE(events[4].is_eam);
}

TEST_CASE("approval status names") {
  CHECK(approval_status_from_string("Approved") == ApprovalStatus::approved);
  CHECK(to_string(ApprovalStatus::pending) == "Pending");
  CHECK_THROWS_AS(approval_status_from_string("maybe"), Error);
  TemplateStore store;
  AuditLog log;
  Authenticator auth("S", store, log);
  CHECK_THROWS_AS(EmergencyAccess(auth, 0), Error);
}
