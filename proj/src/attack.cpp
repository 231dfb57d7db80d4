#include "bdipt/attack.hpp"

#include <algorithm>

namespace bdipt {

std::string_view to_string(Privilege p) {
  switch (p) {
    case Privilege::None: return "none";
    case Privilege::Web: return "web";
    case Privilege::User: return "user";
    case Privilege::Root: return "root";
  }
  return "none";
}

Privilege privilege_from_string(std::string_view name) {
  if (name == "none") return Privilege::None;
  if (name == "web") return Privilege::Web;
  if (name == "user") return Privilege::User;
  if (name == "root") return Privilege::Root;
  throw std::invalid_argument("unknown privilege '" + std::string(name) + "'");
}

ActionError::ActionError(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

Privilege privilege_transition(Privilege current, const AttackOutcome& outcome) {
  if (!outcome.success || !outcome.privilege_granted) return current;
  return std::max(current, *outcome.privilege_granted);
}

}  // namespace bdipt
