#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "bdipt/batch.hpp"
#include "bdipt/program.hpp"
#include "bdipt/reasoner.hpp"
#include "bdipt/runner.hpp"
#include "support.hpp"

using namespace bdipt;

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }
  std::uint64_t u64() { return rng_(); }

  std::string atom_name() { return pick<std::string>({"a", "b", "foo", "port", "svc", "x1", "long_name"}); }
  std::string var_name() { return pick<std::string>({"X", "Y", "Z", "Acc", "V2"}); }

  Term ground_leaf() {
    switch (range(0, 2)) {
      case 0: return Term::atom(atom_name());
      case 1: return Term::number(coin() ? range(0, 500) : range(0, 40) / 4.0);
      default: return Term::string(pick<std::string>({"hi", "a\"b", "back\\slash", "192.168.0.10", "", "two words"}));
    }
  }

  Term term(int depth, bool ground, const std::vector<std::string>& vars = {}) {
    if (!ground && !vars.empty() && coin(0.3)) return Term::variable(pick(vars));
    if (!ground && vars.empty() && coin(0.3)) return Term::variable(var_name());
    if (depth <= 0 || coin(0.55)) return ground_leaf();
    std::vector<Term> args;
    int n = range(1, 3);
    for (int i = 0; i < n; ++i) args.push_back(term(depth - 1, ground, vars));
    return Term::compound(atom_name(), std::move(args));
  }

  Literal literal(bool ground, const std::vector<std::string>& vars = {}, bool allow_negation = true) {
    Term head = coin(0.3) ? Term::atom(atom_name()) : Term::compound(atom_name(), {term(2, ground, vars)});
    std::vector<Term> annots;
    if (coin(0.3)) annots.push_back(source_annotation(pick<std::string>({"self", "target", "percept"})));
    if (coin(0.15)) annots.push_back(term(1, ground, vars));
    return Literal(head, annots, allow_negation && coin(0.15) ? Polarity::Negated : Polarity::Positive);
  }

 private:
  std::mt19937_64 rng_;
};

std::vector<std::string> variables_of(const Literal& l) {
  std::set<std::string> s;
  l.collect_variables(s);
  return {s.begin(), s.end()};
}

ContextPtr random_context(Gen& g, int depth) {
  if (depth <= 0) {
    if (g.coin(0.2)) return ContextFormula::make_true();
    if (g.coin(0.6)) return ContextFormula::make_cond(g.literal(false));
    static const std::vector<CompareOp> ops{CompareOp::Unify, CompareOp::NotUnify, CompareOp::Less,
                                            CompareOp::LessEq, CompareOp::Greater, CompareOp::GreaterEq,
                                            CompareOp::Equal, CompareOp::NotEqual};
    return ContextFormula::make_compare(g.term(1, false), g.pick(ops), g.term(1, false));
  }
  switch (g.range(0, 3)) {
    case 0: return ContextFormula::make_and(random_context(g, depth - 1), random_context(g, depth - 1));
    case 1: return ContextFormula::make_or(random_context(g, depth - 1), random_context(g, depth - 1));
    case 2: return ContextFormula::make_not(random_context(g, depth - 1));
    default: return random_context(g, 0);
  }
}

PlanStep random_step(Gen& g, const std::vector<std::string>& bound) {
  switch (g.range(0, 5)) {
    case 0: {
      std::vector<Term> args;
      int n = g.range(0, 3);
      for (int i = 0; i < n; ++i) args.push_back(g.term(1, bound.empty(), bound));
      return ActionStep{g.pick<std::string>({"probe", "scan", "go"}), std::move(args)};
    }
    case 1: return AchieveStep{g.literal(bound.empty(), bound, false)};
    case 2: return TestStep{g.literal(bound.empty(), bound, false)};
    case 3: return AddBeliefStep{g.literal(bound.empty(), bound)};
    case 4: return RemoveBeliefStep{g.literal(bound.empty(), bound)};
    default: {
      std::vector<Term> args;
      int n = g.range(0, 3);
      for (int i = 0; i < n; ++i) args.push_back(g.term(1, bound.empty(), bound));
      return PrintStep{std::move(args)};
    }
  }
}

AgentProgram random_program(Gen& g) {
  AgentProgram p;
  int beliefs = g.range(0, 4);
  for (int i = 0; i < beliefs; ++i) p.initial_beliefs.push_back(g.literal(true));
  int goals = g.range(0, 2);
  for (int i = 0; i < goals; ++i) p.initial_goals.push_back(g.literal(true, {}, false));
  int plans = g.range(0, 5);
  for (int i = 0; i < plans; ++i) {
    Plan plan;
    if (g.coin()) plan.label = "plan_" + std::to_string(i);
    plan.trigger.op = g.coin() ? TriggerOp::Addition : TriggerOp::Deletion;
    plan.trigger.kind = static_cast<TriggerKind>(g.range(0, 2));
    plan.trigger.literal = g.literal(false, {}, plan.trigger.kind == TriggerKind::Belief);
    if (g.coin(0.7)) plan.context = random_context(g, g.range(0, 3));
    std::vector<std::string> bound = variables_of(plan.trigger.literal);
    int steps = g.range(0, 4);
    for (int k = 0; k < steps; ++k) plan.body.push_back(random_step(g, bound));
    p.plans.push_back(std::move(plan));
  }
  return p;
}

}  // namespace

TEST_CASE("printing and reparsing a random program gives the same program") {
  Gen g(20240601);
  for (int i = 0; i < 500; ++i) {
    AgentProgram p = random_program(g);
    std::string text = print_program(p);
    CAPTURE(text);
    AgentProgram back = parse_program(text);
    CHECK(back == p);
    CHECK(print_program(back) == text);
  }
}

TEST_CASE("terms reparse from their own rendering") {
  Gen g(77);
  for (int i = 0; i < 2000; ++i) {
    Term term = g.term(4, false);
    CAPTURE(term.to_string());
    CHECK(parse_term(term.to_string()) == term);
  }
}

TEST_CASE("unification is symmetric and its result is an idempotent unifier") {
  Gen g(99);
  int unified = 0;
  for (int i = 0; i < 5000; ++i) {
    Term a = g.term(3, false, {"X", "Y", "Z"});
    Term b = g.term(3, false, {"X", "Y", "W"});
    CAPTURE(a.to_string());
    CAPTURE(b.to_string());
    auto ab = unify(a, b);
    auto ba = unify(b, a);
    REQUIRE(ab.has_value() == ba.has_value());
    if (!ab) continue;
    ++unified;
    Term ua = ab->apply(a);
    CHECK(ua == ab->apply(b));
    CHECK(ba->apply(a) == ba->apply(b));
    CHECK(ab->apply(ua) == ua);
    CHECK(unify(ua, ba->apply(b)).has_value());
  }
  CHECK(unified > 500);
}

TEST_CASE("unification refuses cyclic bindings") {
  Gen g(5);
  for (int i = 0; i < 1000; ++i) {
    Term inner = g.term(2, false, {"Y"});
    Term cyclic = Term::compound(g.atom_name(), {inner, Term::variable("X")});
    CHECK_FALSE(unify(Term::variable("X"), cyclic).has_value());
    CHECK_FALSE(unify(cyclic, Term::variable("X")).has_value());
  }
  CHECK_FALSE(unify(parse_term("f(X, Y)"), parse_term("f(Y, g(X))")).has_value());
}

TEST_CASE("the belief base behaves like a keyed set with merged annotations") {
  Gen g(31337);
  for (int round = 0; round < 20; ++round) {
    BeliefBase bb;
    std::map<std::pair<bool, Term>, std::set<Term>> oracle;
    for (int op = 0; op < 1000; ++op) {
      Literal l(Term::compound(g.pick<std::string>({"p", "q"}), {Term::number(g.range(0, 6))}),
                g.coin() ? std::vector<Term>{source_annotation(g.pick<std::string>({"self", "target"}))}
                         : std::vector<Term>{},
                g.coin(0.2) ? Polarity::Negated : Polarity::Positive);
      const std::pair<bool, Term> key{l.negated(), l.term()};
      const bool present = oracle.contains(key);
      int choice = g.range(0, 2);
      if (choice == 0) {
        auto events = bb.add(l);
        CHECK(events.size() == (present ? 0u : 1u));
        if (!present) CHECK(events[0].op == BeliefOp::Addition);
        oracle[key].insert(l.annotations().begin(), l.annotations().end());
      } else if (choice == 1) {
        auto events = bb.remove(l);
        CHECK(events.size() == (present ? 1u : 0u));
        if (present) CHECK(events[0].op == BeliefOp::Deletion);
        oracle.erase(key);
      } else {
        auto events = bb.update_from_percepts({l});
        CHECK(events.size() == (present ? 0u : 1u));
        oracle[key].insert(l.annotations().begin(), l.annotations().end());
      }
      CHECK(bb.contains(l) == oracle.contains(key));
    }
    std::vector<std::string> expected;
    for (const auto& [key, annots] : oracle)
      expected.push_back(
          Literal(key.second, {annots.begin(), annots.end()}, key.first ? Polarity::Negated : Polarity::Positive)
              .to_string());
    std::sort(expected.begin(), expected.end());
    CHECK(bb.dump() == expected);
    CHECK(bb.size() == oracle.size());
  }
}

namespace {

Scenario random_scenario(Gen& g) {
  Scenario s;
  s.name = "random";
  int hosts = g.range(1, 3);
  const std::vector<std::string> services{"ssh", "ftp", "telnet", "mysql", "nginx", "apache", "smb"};
  for (int h = 0; h < hosts; ++h) {
    TargetSpec t;
    t.name = h == 0 ? "target" : "host" + std::to_string(h);
    t.os = g.pick<std::string>({"linux", "windows", "openbsd"});
    std::set<int> ports;
    int nports = g.range(0, 4);
    const std::vector<int> port_pool{21, 22, 23, 80, 443, 445, 3306};
    for (int i = 0; i < nports; ++i) ports.insert(g.pick(port_pool));
    t.ports.assign(ports.begin(), ports.end());
    for (int p : t.ports)
      if (g.coin(0.8)) t.services.push_back({p, g.pick(services)});
    int nvulns = g.range(0, 3);
    for (int i = 0; i < nvulns; ++i)
      t.vulnerabilities.push_back({"cve_" + std::to_string(h) + "_" + std::to_string(i),
                                   static_cast<VulnKind>(g.range(0, 2))});
    for (const auto& svc : t.services)
      if (g.coin(0.4)) t.credentials.push_back({svc.name, "pw" + std::to_string(g.range(0, 99))});
    if (g.coin(0.4)) t.staff.push_back({"staff" + std::to_string(h) + "@corp.example", g.range(0, 10) / 10.0});
    if (hosts > 1 && g.coin(0.7)) t.subnet = "lan0";
    s.targets.push_back(std::move(t));
  }
  s.seed = g.u64() % 100000;
  s.max_cycles = 2000;
  return s;
}

}  // namespace

TEST_CASE("random scenarios survive serialization") {
  Gen g(4242);
  for (int i = 0; i < 200; ++i) {
    Scenario s = random_scenario(g);
    CHECK(load_scenario(serialize_scenario(s)) == s);
  }
}

TEST_CASE("privilege never decreases and every run ends on its own") {
  Gen g(8080);
  const AgentProgram pentest = testing_support::agent("pentest");
  const AgentProgram pivot = testing_support::agent("pivot");
  for (int i = 0; i < 300; ++i) {
    Scenario s = random_scenario(g);
    RunOptions options;
    options.record_trace = false;
    RunResult r = run_scenario(s, g.coin() ? pentest : pivot, options);
    CAPTURE(serialize_scenario(s));
    CHECK(r.outcome != RunOutcome::CycleCap);
    Privilege last = Privilege::None;
    std::uint64_t draws = 0;
    for (const auto& step : r.report.steps) {
      Privilege now = privilege_from_string(step.privilege_after);
      CHECK(now >= last);
      last = now;
      if (step.draw) {
        ++draws;
        CHECK(*step.draw >= 0.0);
        CHECK(*step.draw < 1.0);
      }
      if (step.outcome == "ok" || step.outcome == "success" || step.outcome == "failure") continue;
      CHECK_FALSE(step.draw);
    }
    CHECK(to_string(last) == r.report.final_privilege);
    CHECK(draws == r.report.draws);
    CHECK((r.outcome == RunOutcome::GoalAchieved) == (r.report.final_privilege == "root"));
  }
}

TEST_CASE("same seed, same bytes") {
  Gen g(1234);
  const AgentProgram pentest = testing_support::agent("pentest");
  for (int i = 0; i < 40; ++i) {
    Scenario s = i % 2 == 0 ? testing_support::scenario("table2") : random_scenario(g);
    RunOptions options;
    options.seed = g.u64();
    RunResult a = run_scenario(s, pentest, options);
    RunResult b = run_scenario(s, pentest, options);
    CHECK(a.trace == b.trace);
    CHECK(emit_report(a.report, ReportFormat::Machine) == emit_report(b.report, ReportFormat::Machine));
    CHECK(emit_report(a.report, ReportFormat::Human) == emit_report(b.report, ReportFormat::Human));
  }
}

namespace {

struct TableEnv : Environment {
  std::map<std::string, bool> succeeds;
  std::vector<std::string> calls;

  ActionResult execute(const ActionCall& call, const BeliefBase&) override {
    calls.push_back(call.name);
    auto it = succeeds.find(call.name);
    if (it == succeeds.end()) return ActionResult{ActionStatus::Unknown, {}, {}};
    return ActionResult{it->second ? ActionStatus::Ok : ActionStatus::Failed, {}, {}};
  }
};

struct Alternative {
  bool applicable;
  bool succeeds;
};

// Expected behaviour: applicable alternatives are tried once each, in library
// order, until one succeeds.
std::vector<std::string> expected_calls(const std::vector<Alternative>& alts, bool& achieved) {
  std::vector<std::string> out;
  achieved = false;
  for (std::size_t i = 0; i < alts.size(); ++i) {
    if (!alts[i].applicable) continue;
    out.push_back("act" + std::to_string(i));
    if (alts[i].succeeds) {
      achieved = true;
      break;
    }
  }
  return out;
}

void check_alternatives(const std::vector<Alternative>& alts) {
  std::string source = "!done.\n";
  for (std::size_t i = 0; i < alts.size(); ++i)
    if (alts[i].applicable) source += "ready" + std::to_string(i) + ".\n";
  for (std::size_t i = 0; i < alts.size(); ++i)
    source += "+!done : ready" + std::to_string(i) + " <- act" + std::to_string(i) + "; +done.\n";
  CAPTURE(source);

  AgentState st = init_agent(parse_program(source), PriorityTable{});
  TableEnv env;
  for (std::size_t i = 0; i < alts.size(); ++i) env.succeeds["act" + std::to_string(i)] = alts[i].succeeds;
  RunOutcome outcome = run_agent(st, env, 1000);

  bool achieved = false;
  CHECK(env.calls == expected_calls(alts, achieved));
  CHECK(outcome == (achieved ? RunOutcome::GoalAchieved : RunOutcome::Exhausted));
  const bool failure_logged = std::any_of(st.trace.begin(), st.trace.end(), [](const std::string& l) {
    return l.find("goal done failed: no applicable plan left") != std::string::npos;
  });
  CHECK(failure_logged == !achieved);
  CHECK(st.beliefs.contains(Literal(Term::compound("attack_failed", {Term::atom("done")}))) == !achieved);
}

}  // namespace

TEST_CASE("every state of the two-plan machine") {
  for (int mask = 0; mask < 16; ++mask) {
    CAPTURE(mask);
    check_alternatives({{(mask & 1) != 0, (mask & 2) != 0}, {(mask & 4) != 0, (mask & 8) != 0}});
  }
}

TEST_CASE("failure recovery tries each plan at most once and terminates") {
  Gen g(2718);
  for (int i = 0; i < 200; ++i) {
    std::vector<Alternative> alts(static_cast<std::size_t>(g.range(1, 8)));
    for (auto& a : alts) a = {g.coin(0.7), g.coin(0.3)};
    check_alternatives(alts);
  }
}

TEST_CASE("a failing subgoal falls back to the parent's next plan") {
  Gen g(161);
  for (int i = 0; i < 100; ++i) {
    int depth = g.range(1, 5);
    std::string source = "!done.\n+!done <- !level0; +done.\n+!done <- rescue; +done.\n";
    for (int d = 0; d < depth; ++d) source += "+!level" + std::to_string(d) + " <- !level" + std::to_string(d + 1) + ".\n";
    source += "+!level" + std::to_string(depth) + " <- broken.\n";
    AgentState st = init_agent(parse_program(source), PriorityTable{});
    TableEnv env;
    env.succeeds = {{"broken", false}, {"rescue", true}};
    CHECK(run_agent(st, env, 1000) == RunOutcome::GoalAchieved);
    CHECK(env.calls == std::vector<std::string>{"broken", "rescue"});
  }
}
