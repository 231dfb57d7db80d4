#include "bdipt/actions.hpp"

#include <algorithm>

namespace bdipt {

namespace {

std::string arg_text(const Term& t) {
  if (t.is_number()) return format_number(t.value());
  if (t.is_variable()) throw PreconditionUnmet("unbound argument " + t.name());
  return t.name();
}

Literal about(std::string functor, std::vector<Term> args, const std::string& target) {
  return Literal(Term::compound(std::move(functor), std::move(args)), {source_annotation(target)});
}

bool believes(const BeliefBase& beliefs, const Literal& pattern) { return !beliefs.query(pattern).empty(); }

bool believes_any_failure(const BeliefBase& beliefs, const std::string& target) {
  const Term src = source_annotation(target);
  for (const auto& l : beliefs.literals()) {
    const auto& f = l.functor();
    if (f.size() > 14 && f.ends_with("_attack_failed") &&
        std::find(l.annotations().begin(), l.annotations().end(), src) != l.annotations().end())
      return true;
  }
  return false;
}

AttackOutcome adjudicate(RunContext& run, const std::string& target, ActionRequest request) {
  const TargetSpec& spec = run.target(target);
  AttackContext ctx{run.privilege_on(target), run.scenario.targets};
  AttackOutcome out = resolve_attack(spec, request, run.rng, run.scenario.thresholds, ctx);
  run.privilege[target] = privilege_transition(run.privilege_on(target), out);
  return out;
}

}  // namespace

Privilege RunContext::privilege_on(const std::string& target) const {
  auto it = privilege.find(target);
  return it == privilege.end() ? Privilege::None : it->second;
}

Privilege RunContext::overall() const {
  Privilege p = Privilege::None;
  for (const auto& [_, v] : privilege) p = std::max(p, v);
  return p;
}

const TargetSpec& RunContext::target(const std::string& name) const {
  const TargetSpec* t = scenario.find_target(name);
  if (!t) throw UnknownTarget(name);
  return *t;
}

PerceptBatch info_gather(const RunContext& run, const std::string& target, ProbeFacet facet) {
  return handle_probe(run.target(target), facet);
}

AttackOutcome buffer_overflow_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                                     const std::string& vulnerability, VulnKind mode) {
  run.target(target);
  if (mode == VulnKind::Sqli) throw PreconditionUnmet("buffer overflow mode must be remote or local");
  if (!believes(beliefs, about("vulnerability", {Term::atom(vulnerability)}, target)))
    throw PreconditionUnmet("vulnerability " + vulnerability + " on " + target + " is not believed");
  return adjudicate(run, target,
                    {"bof_attack", target, {Term::atom(vulnerability), Term::atom(std::string(to_string(mode)))}});
}

AttackOutcome sql_injection_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target) {
  run.target(target);
  bool web = believes(beliefs, about("service", {Term::atom("nginx")}, target)) ||
             believes(beliefs, about("service", {Term::atom("apache")}, target));
  if (!web || !believes(beliefs, about("port", {Term::number(80)}, target)))
    throw PreconditionUnmet("sql injection needs port 80 and a web service believed on " + target);
  return adjudicate(run, target, {"sqli_attack", target, {}});
}

AttackOutcome password_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                              const std::string& service) {
  run.target(target);
  if (!believes(beliefs, about("service", {Term::atom(service)}, target)))
    throw PreconditionUnmet("service " + service + " on " + target + " is not believed");
  return adjudicate(run, target, {"password_attack", target, {Term::atom(service)}});
}

AttackOutcome sniffer_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target,
                             const std::string& peer) {
  const TargetSpec& spec = run.target(target);
  if (run.scenario.subnet_peers(spec).empty()) throw NoSubnetPeer(target);
  if (!believes_any_failure(beliefs, target))
    throw PreconditionUnmet("sniffing " + target + " needs a failed direct attack first");
  return adjudicate(run, target, {"sniffer_attack", target, {Term::atom(peer)}});
}

AttackOutcome social_engineering_attack(RunContext& run, const BeliefBase& beliefs, const std::string& target) {
  run.target(target);
  if (!believes(beliefs, about("email", {Term::variable("E")}, target))) throw NoStaffKnown(target);
  return adjudicate(run, target, {"social_attack", target, {}});
}

const ActionCatalog& ActionCatalog::standard() {
  static const ActionCatalog catalog = [] {
    ActionCatalog c;
    auto probe = [](ProbeFacet facet) {
      return [facet](RunContext& run, const BeliefBase&, std::span<const Term> args) {
        std::string target = arg_text(args[0]);
        return ActionEffect{ActionKind::Probe, target, info_gather(run, target, facet), std::nullopt};
      };
    };
    c.add("probe_os", 1, probe(ProbeFacet::Os));
    c.add("probe_ports", 1, probe(ProbeFacet::Port));
    c.add("probe_services", 1, probe(ProbeFacet::Service));
    c.add("probe_vulnerabilities", 1, probe(ProbeFacet::Vulnerability));
    c.add("probe_emails", 1, probe(ProbeFacet::Email));

    auto attack = [](std::string target, AttackOutcome out) {
      PerceptBatch evidence = out.evidence;
      return ActionEffect{ActionKind::Attack, std::move(target), std::move(evidence), std::move(out)};
    };
    c.add("bof_attack", 3, [attack](RunContext& run, const BeliefBase& b, std::span<const Term> args) {
      std::string target = arg_text(args[0]);
      std::string mode = arg_text(args[2]);
      if (mode != "remote" && mode != "local") throw PreconditionUnmet("buffer overflow mode must be remote or local");
      VulnKind kind = mode == "remote" ? VulnKind::Remote : VulnKind::Local;
      return attack(target, buffer_overflow_attack(run, b, target, arg_text(args[1]), kind));
    });
    c.add("sqli_attack", 1, [attack](RunContext& run, const BeliefBase& b, std::span<const Term> args) {
      std::string target = arg_text(args[0]);
      return attack(target, sql_injection_attack(run, b, target));
    });
    c.add("password_attack", 2, [attack](RunContext& run, const BeliefBase& b, std::span<const Term> args) {
      std::string target = arg_text(args[0]);
      return attack(target, password_attack(run, b, target, arg_text(args[1])));
    });
    c.add("sniffer_attack", 2, [attack](RunContext& run, const BeliefBase& b, std::span<const Term> args) {
      std::string target = arg_text(args[0]);
      return attack(target, sniffer_attack(run, b, target, arg_text(args[1])));
    });
    c.add("social_attack", 1, [attack](RunContext& run, const BeliefBase& b, std::span<const Term> args) {
      std::string target = arg_text(args[0]);
      return attack(target, social_engineering_attack(run, b, target));
    });
    c.add("report", 0, [](RunContext&, const BeliefBase&, std::span<const Term>) {
      return ActionEffect{ActionKind::Report, "", {}, std::nullopt};
    });
    return c;
  }();
  return catalog;
}

void ActionCatalog::add(std::string name, std::size_t arity, Handler handler) {
  handlers_[{std::move(name), arity}] = std::move(handler);
}

bool ActionCatalog::contains(const std::string& name, std::size_t arity) const {
  return handlers_.contains({name, arity});
}

ActionEffect ActionCatalog::invoke(RunContext& run, const BeliefBase& beliefs, const std::string& name,
                                   std::span<const Term> args) const {
  auto it = handlers_.find({name, args.size()});
  if (it == handlers_.end()) throw UnknownAction(name, args.size());
  return it->second(run, beliefs, args);
}

std::vector<std::string> ActionCatalog::signatures() const {
  std::vector<std::string> out;
  for (const auto& [key, _] : handlers_) out.push_back(key.first + "/" + std::to_string(key.second));
  return out;
}

}  // namespace bdipt
