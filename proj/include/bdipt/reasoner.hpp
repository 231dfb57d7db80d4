#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdipt/belief_base.hpp"
#include "bdipt/program.hpp"

namespace bdipt {

struct ActionCall {
  std::string name;
  std::vector<Term> args;  // fully instantiated
  std::uint64_t cycle = 0;
};

enum class ActionStatus : unsigned char { Ok, Failed, Unknown };

struct ActionResult {
  ActionStatus status = ActionStatus::Ok;
  PerceptBatch percepts;
  std::vector<std::string> messages;  // trace lines, without the agent prefix
};

/// What the agent acts on and perceives.
class Environment {
 public:
  virtual ~Environment() = default;
  /// Percepts arriving independently of the agent's own actions.
  virtual PerceptBatch perceive() { return {}; }
  virtual ActionResult execute(const ActionCall& call, const BeliefBase& beliefs) = 0;
};

/// Plan preference: higher wins, ties go to library order.
class PriorityTable {
 public:
  PriorityTable() = default;
  /// information_gathering 100, buffer_overflow 30, sql_injection 20,
  /// password 10, sniffer 5, social_engineering 1.
  static PriorityTable defaults();

  void set(std::string key, int priority) { entries_[std::move(key)] = priority; }
  /// Exact label, else the longest key k with label starting "k_", else the
  /// plan's own priority (0 unless assigned).
  int lookup(const Plan& plan) const;
  const std::map<std::string, int>& entries() const { return entries_; }

 private:
  std::map<std::string, int> entries_;
};

/// A trigger waiting to be handled. `intention` names the intention that
/// posted it as a subgoal (or whose root plan failed); `attempted` holds the
/// library indices of plans already tried for it.
struct PendingEvent {
  TriggerEvent trigger;
  std::optional<std::uint64_t> intention;
  std::set<std::size_t> attempted;
};

/// A plan instance whose variables have been renamed apart.
struct PlanOption {
  std::size_t index = 0;  // position in the library
  Plan instance;
  Substitution bindings;
};

using DesireSet = std::vector<PlanOption>;

struct Frame {
  std::size_t plan_index = 0;
  Plan instance;
  std::size_t next_step = 0;
  Substitution bindings;
  PendingEvent event;  // what this frame handles, for re-posting on failure
  std::optional<Literal> awaiting;  // subgoal posted by this frame
};

enum class IntentionStatus : unsigned char { Active, Suspended, Failed, Done };

struct Intention {
  std::uint64_t id = 0;
  std::vector<Frame> stack;
  IntentionStatus status = IntentionStatus::Active;
  std::set<std::string> attempted_plans;  // labels tried for the current goal
};

enum class StepOutcome : unsigned char { Ok, StepFailed, SubgoalPosted, IntentionDone };
enum class CycleResult : unsigned char { Running, GoalAchieved, Exhausted };

class NoInitialGoal : public std::invalid_argument {
 public:
  NoInitialGoal() : std::invalid_argument("agent program has no initial goal") {}
};

struct AgentState {
  std::string name = "bdi_agent";
  BeliefBase beliefs;
  std::deque<PendingEvent> events;
  std::vector<Intention> intentions;
  std::vector<Plan> plan_library;
  PriorityTable priorities;
  Literal goal;
  std::uint64_t cycle_count = 0;

  std::vector<std::string> trace;
  bool record_trace = true;

  std::uint64_t next_intention_id = 1;
  std::uint64_t rename_counter = 0;
  std::uint64_t intentions_failed = 0;
  std::uint64_t intentions_done = 0;

  void log(const std::string& message);
};

AgentState init_agent(const AgentProgram& program, PriorityTable priorities, std::string name = "bdi_agent");

std::optional<PendingEvent> select_event(AgentState& state);

/// Plans whose trigger matches `event`, in library order, carrying the trigger
/// unifier. When the event literal has variables, each plan is first renamed
/// apart by appending `suffix` to its variable names.
DesireSet relevant_plans(const std::vector<Plan>& library, const TriggerEvent& event, const std::string& suffix = "#0");

/// Every solution of `formula` under `beliefs`, extending `s`.
std::vector<Substitution> evaluate_context(const ContextFormula& formula, const BeliefBase& beliefs,
                                           const Substitution& s);

/// Relevant plans whose context holds, bindings extended by the first context
/// solution.
DesireSet applicable_plans(DesireSet relevant, const BeliefBase& beliefs);

std::optional<PlanOption> select_intention(const DesireSet& desires, const PriorityTable& table,
                                           const std::set<std::size_t>& attempted);

/// Runs the next body step of `intention`. Plan failures are recovered via
/// handle_failure before returning StepFailed.
StepOutcome execute_step(AgentState& state, Intention& intention, Environment& env);

/// Pops the failed plan and re-posts its triggering event at the front of the
/// queue with the plan marked attempted.
void handle_failure(AgentState& state, Intention& intention);

bool goal_achieved(const AgentState& state);

/// One pass: perceive, update beliefs, select and dispatch an event when no
/// intention is runnable, execute one step, check the goal.
CycleResult reasoning_cycle(AgentState& state, Environment& env);

enum class RunOutcome : unsigned char { GoalAchieved, Exhausted, CycleCap };

RunOutcome run_agent(AgentState& state, Environment& env, std::uint64_t max_cycles);

}  // namespace bdipt
