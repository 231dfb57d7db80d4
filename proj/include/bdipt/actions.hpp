#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdipt/attack.hpp"
#include "bdipt/belief_base.hpp"
#include "bdipt/target_sim.hpp"

namespace bdipt {

/// Per-run mutable state the catalog acts on. Confined to one thread.
struct RunContext {
  const Scenario& scenario;
  RunRng& rng;
  std::map<std::string, Privilege> privilege;  // per target; absent = none

  Privilege privilege_on(const std::string& target) const;
  /// Highest privilege held on any target.
  Privilege overall() const;
  const TargetSpec& target(const std::string& name) const;  // throws UnknownTarget
};

/// Deterministic, draw-free probe of one facet.
PerceptBatch info_gather(const RunContext& run, const std::string& target, ProbeFacet facet);

AttackOutcome buffer_overflow_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                                     const std::string& vulnerability, VulnKind mode);
AttackOutcome sql_injection_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target);
AttackOutcome password_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                              const std::string& service);
AttackOutcome sniffer_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                             const std::string& peer);
AttackOutcome social_engineering_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target);

enum class ActionKind : unsigned char { Probe, Attack, Report };

struct ActionEffect {
  ActionKind kind = ActionKind::Probe;
  std::string target;
  PerceptBatch percepts;
  std::optional<AttackOutcome> outcome;  // attacks only
};

/// Registry of the actions plan bodies may call, keyed by name/arity:
/// probe_os/1 probe_ports/1 probe_services/1 probe_vulnerabilities/1
/// probe_emails/1 bof_attack/3 sqli_attack/1 password_attack/2
/// sniffer_attack/2 social_attack/1 report/0
class ActionCatalog {
 public:
  using Handler = std::function<ActionEffect(RunContext&, const BeliefBase&, std::span<const Term>)>;

  static const ActionCatalog& standard();

  void add(std::string name, std::size_t arity, Handler handler);
  bool contains(const std::string& name, std::size_t arity) const;
  /// Runs the action; successful attacks also raise the run's privilege.
  /// Throws UnknownAction or any ActionError the action raises.
  ActionEffect invoke(RunContext& run, const BeliefBase& beliefs, const std::string& name,
                      std::span<const Term> args) const;
  std::vector<std::string> signatures() const;

 private:
  std::map<std::pair<std::string, std::size_t>, Handler> handlers_;
};

}  // namespace bdipt
