#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bdipt/belief_base.hpp"
#include "bdipt/term.hpp"

namespace bdipt {

/// Access level on a target. Totally ordered; runs only ever move upward.
enum class Privilege : unsigned char { None = 0, Web = 1, User = 2, Root = 3 };

std::string_view to_string(Privilege p);
/// Throws std::invalid_argument for unknown names.
Privilege privilege_from_string(std::string_view name);

struct ActionRequest {
  std::string action;
  std::string target;
  std::vector<Term> args;
};

struct AttackOutcome {
  std::string action;
  bool success = false;
  std::optional<Privilege> privilege_granted;  // none unless success
  std::optional<double> draw;                  // set iff a draw was consumed
  PerceptBatch evidence;
};

/// Failure to even launch an action. The reasoner treats it as a failed step.
class ActionError : public std::runtime_error {
 public:
  ActionError(std::string code, const std::string& message);
  /// Report outcome code, e.g. "precondition-unmet".
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class PreconditionUnmet : public ActionError {
 public:
  explicit PreconditionUnmet(const std::string& message) : ActionError("precondition-unmet", message) {}
};

class NoSubnetPeer : public ActionError {
 public:
  explicit NoSubnetPeer(const std::string& target)
      : ActionError("no-subnet-peer", "target " + target + " has no subnet peers") {}
};

class NoStaffKnown : public ActionError {
 public:
  explicit NoStaffKnown(const std::string& target)
      : ActionError("no-staff-known", "no staff email known for " + target) {}
};

class UnknownTarget : public ActionError {
 public:
  explicit UnknownTarget(const std::string& target) : ActionError("unknown-target", "unknown target " + target) {}
};

class UnknownAction : public ActionError {
 public:
  UnknownAction(const std::string& name, std::size_t arity)
      : ActionError("unknown-action", "unknown action " + name + "/" + std::to_string(arity)) {}
};

/// max(current, granted); failures leave the privilege unchanged.
Privilege privilege_transition(Privilege current, const AttackOutcome& outcome);

}  // namespace bdipt
