#include "bdipt/reasoner.hpp"

#include <algorithm>

namespace bdipt {

namespace {

ContextPtr rename_context(const ContextPtr& f, const std::string& suffix) {
  return std::visit(
      [&](const auto& n) -> ContextPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ContextFormula::True>) {
          return f;
        } else if constexpr (std::is_same_v<N, ContextFormula::Cond>) {
          return ContextFormula::make_cond(rename_variables(n.literal, suffix));
        } else if constexpr (std::is_same_v<N, ContextFormula::Compare>) {
          return ContextFormula::make_compare(rename_variables(n.lhs, suffix), n.op, rename_variables(n.rhs, suffix));
        } else if constexpr (std::is_same_v<N, ContextFormula::And>) {
          return ContextFormula::make_and(rename_context(n.lhs, suffix), rename_context(n.rhs, suffix));
        } else if constexpr (std::is_same_v<N, ContextFormula::Or>) {
          return ContextFormula::make_or(rename_context(n.lhs, suffix), rename_context(n.rhs, suffix));
        } else {
          return ContextFormula::make_not(rename_context(n.operand, suffix));
        }
      },
      f->node);
}

std::vector<Term> rename_terms(const std::vector<Term>& ts, const std::string& suffix) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(rename_variables(t, suffix));
  return out;
}

PlanStep rename_step(const PlanStep& step, const std::string& suffix) {
  return std::visit(
      [&](const auto& s) -> PlanStep {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ActionStep>) {
          return ActionStep{s.name, rename_terms(s.args, suffix)};
        } else if constexpr (std::is_same_v<S, PrintStep>) {
          return PrintStep{rename_terms(s.args, suffix)};
        } else {
          return S{rename_variables(s.literal, suffix)};
        }
      },
      step);
}

Plan rename_plan(const Plan& p, const std::string& suffix) {
  Plan out;
  out.label = p.label;
  out.priority = p.priority;
  out.trigger = TriggerEvent{p.trigger.op, p.trigger.kind, rename_variables(p.trigger.literal, suffix)};
  out.context = rename_context(p.context, suffix);
  out.body.reserve(p.body.size());
  for (const auto& s : p.body) out.body.push_back(rename_step(s, suffix));
  return out;
}

bool compare_holds(const Term& l, CompareOp op, const Term& r) {
  if (!l.is_ground() || !r.is_ground()) return false;
  std::partial_ordering c = (l.is_number() && r.is_number()) ? (l.value() <=> r.value()) : (l <=> r);
  switch (op) {
    case CompareOp::Less: return c < 0;
    case CompareOp::LessEq: return c <= 0;
    case CompareOp::Greater: return c > 0;
    case CompareOp::GreaterEq: return c >= 0;
    default: return false;
  }
}

Intention* find_intention(AgentState& st, std::uint64_t id) {
  auto it = std::find_if(st.intentions.begin(), st.intentions.end(), [&](const Intention& i) { return i.id == id; });
  return it == st.intentions.end() ? nullptr : &*it;
}

Intention* runnable(AgentState& st) {
  for (auto& i : st.intentions)
    if (i.status == IntentionStatus::Active && !i.stack.empty()) return &i;
  return nullptr;
}

void post_belief_events(AgentState& st, const std::vector<BeliefEvent>& events) {
  for (const auto& e : events) {
    TriggerOp op = e.op == BeliefOp::Addition ? TriggerOp::Addition : TriggerOp::Deletion;
    st.events.push_back(PendingEvent{TriggerEvent{op, TriggerKind::Belief, e.literal}, std::nullopt, {}});
  }
}

std::string plan_key(const Plan& p, std::size_t index) {
  return p.label ? *p.label : "#" + std::to_string(index);
}

void assert_goal_failure(AgentState& st, const Literal& goal) {
  st.log("goal " + goal.to_string() + " failed: no applicable plan left");
  if (!goal.is_ground()) return;
  Literal marker(Term::compound("attack_failed", {goal.term()}), {source_annotation("self")});
  post_belief_events(st, st.beliefs.add(marker));
}

/// Pops finished frames, propagating subgoal bindings to the parent.
void settle(AgentState& st, Intention& in) {
  while (!in.stack.empty()) {
    Frame& top = in.stack.back();
    if (top.awaiting || top.next_step < top.instance.body.size()) return;
    Literal achieved = top.instance.trigger.literal.apply(top.bindings);
    in.stack.pop_back();
    if (in.stack.empty()) break;
    Frame& parent = in.stack.back();
    if (parent.awaiting) {
      if (auto s = unify(parent.awaiting->term(), achieved.term(), parent.bindings)) parent.bindings = std::move(*s);
      parent.awaiting.reset();
    }
    in.attempted_plans.clear();
  }
  in.status = IntentionStatus::Done;
  ++st.intentions_done;
}

void dispatch(AgentState& st, PendingEvent ev) {
  const std::string suffix = "#" + std::to_string(++st.rename_counter);
  DesireSet desires = applicable_plans(relevant_plans(st.plan_library, ev.trigger, suffix), st.beliefs);
  std::optional<PlanOption> choice = select_intention(desires, st.priorities, ev.attempted);

  Intention* owner = ev.intention ? find_intention(st, *ev.intention) : nullptr;
  if (!choice) {
    const bool goal = ev.trigger.kind == TriggerKind::Achieve && ev.trigger.op == TriggerOp::Addition;
    if (owner && !owner->stack.empty()) {
      // the subgoal has no way forward, so the plan that posted it fails
      handle_failure(st, *owner);
      return;
    }
    if (owner) {
      owner->status = IntentionStatus::Failed;
      ++st.intentions_failed;
    }
    if (goal) assert_goal_failure(st, ev.trigger.literal);
    return;
  }

  if (!owner) {
    st.intentions.push_back(Intention{st.next_intention_id++, {}, IntentionStatus::Active, {}});
    owner = &st.intentions.back();
  }
  owner->attempted_plans.insert(plan_key(choice->instance, choice->index));
  owner->stack.push_back(Frame{choice->index, std::move(choice->instance), 0, std::move(choice->bindings),
                               std::move(ev), std::nullopt});
  owner->status = IntentionStatus::Active;
  settle(st, *owner);
  if (owner->stack.empty()) owner->status = IntentionStatus::Done;
}

void prune(AgentState& st) {
  std::erase_if(st.intentions, [](const Intention& i) {
    return i.status == IntentionStatus::Done || i.status == IntentionStatus::Failed;
  });
}

}  // namespace

void AgentState::log(const std::string& message) {
  if (record_trace) trace.push_back("[" + name + "] " + message);
}

PriorityTable PriorityTable::defaults() {
  PriorityTable t;
  t.set("information_gathering", 100);
  t.set("buffer_overflow", 30);
  t.set("sql_injection", 20);
  t.set("password", 10);
  t.set("sniffer", 5);
  t.set("social_engineering", 1);
  return t;
}

int PriorityTable::lookup(const Plan& plan) const {
  if (!plan.label) return plan.priority;
  const std::string& label = *plan.label;
  if (auto it = entries_.find(label); it != entries_.end()) return it->second;
  std::size_t best = 0;
  std::optional<int> found;
  for (const auto& [key, prio] : entries_) {
    if (label.size() > key.size() && label.starts_with(key) && label[key.size()] == '_' && key.size() > best) {
      best = key.size();
      found = prio;
    }
  }
  return found.value_or(plan.priority);
}

AgentState init_agent(const AgentProgram& program, PriorityTable priorities, std::string name) {
  if (program.initial_goals.empty()) throw NoInitialGoal();
  AgentState st;
  st.name = std::move(name);
  st.plan_library = program.plans;
  st.priorities = std::move(priorities);
  st.goal = program.initial_goals.front();
  if (!st.goal.is_ground()) throw std::invalid_argument("initial goal must be ground: " + st.goal.to_string());
  for (const auto& b : program.initial_beliefs) st.beliefs.add(b.with_annotation(source_annotation("self")));
  for (const auto& g : program.initial_goals)
    st.events.push_back(PendingEvent{TriggerEvent{TriggerOp::Addition, TriggerKind::Achieve, g}, std::nullopt, {}});
  return st;
}

std::optional<PendingEvent> select_event(AgentState& state) {
  if (state.events.empty()) return std::nullopt;
  PendingEvent ev = std::move(state.events.front());
  state.events.pop_front();
  return ev;
}

DesireSet relevant_plans(const std::vector<Plan>& library, const TriggerEvent& event, const std::string& suffix) {
  DesireSet out;
  const Literal& lit = event.literal;
  for (std::size_t i = 0; i < library.size(); ++i) {
    const TriggerEvent& t = library[i].trigger;
    if (t.op != event.op || t.kind != event.kind || t.literal.polarity() != lit.polarity() ||
        t.literal.functor() != lit.functor() || t.literal.arity() != lit.arity())
      continue;
    Plan inst = lit.is_ground() ? library[i] : rename_plan(library[i], suffix);
    auto sols = match_literal(inst.trigger.literal, lit, {});
    if (sols.empty()) continue;
    out.push_back(PlanOption{i, std::move(inst), std::move(sols.front())});
  }
  return out;
}

std::vector<Substitution> evaluate_context(const ContextFormula& formula, const BeliefBase& beliefs,
                                           const Substitution& s) {
  return std::visit(
      [&](const auto& n) -> std::vector<Substitution> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ContextFormula::True>) {
          return {s};
        } else if constexpr (std::is_same_v<N, ContextFormula::Cond>) {
          return beliefs.query(n.literal, s);
        } else if constexpr (std::is_same_v<N, ContextFormula::Compare>) {
          Term l = s.apply(n.lhs);
          Term r = s.apply(n.rhs);
          bool holds = false;
          switch (n.op) {
            case CompareOp::Unify:
              if (auto u = unify(l, r, s)) return {*u};
              return {};
            case CompareOp::NotUnify: holds = !unify(l, r, s).has_value(); break;
            case CompareOp::Equal: holds = l == r; break;
            case CompareOp::NotEqual: holds = !(l == r); break;
            default: holds = compare_holds(l, n.op, r); break;
          }
          if (holds) return {s};
          return {};
        } else if constexpr (std::is_same_v<N, ContextFormula::And>) {
          std::vector<Substitution> out;
          for (const auto& left : evaluate_context(*n.lhs, beliefs, s)) {
            auto right = evaluate_context(*n.rhs, beliefs, left);
            out.insert(out.end(), right.begin(), right.end());
          }
          return out;
        } else if constexpr (std::is_same_v<N, ContextFormula::Or>) {
          auto out = evaluate_context(*n.lhs, beliefs, s);
          auto right = evaluate_context(*n.rhs, beliefs, s);
          out.insert(out.end(), right.begin(), right.end());
          return out;
        } else {
          if (evaluate_context(*n.operand, beliefs, s).empty()) return {s};
          return {};
        }
      },
      formula.node);
}

DesireSet applicable_plans(DesireSet relevant, const BeliefBase& beliefs) {
  DesireSet out;
  for (auto& option : relevant) {
    auto sols = evaluate_context(*option.instance.context, beliefs, option.bindings);
    if (sols.empty()) continue;
    out.push_back(PlanOption{option.index, std::move(option.instance), std::move(sols.front())});
  }
  return out;
}

std::optional<PlanOption> select_intention(const DesireSet& desires, const PriorityTable& table,
                                           const std::set<std::size_t>& attempted) {
  const PlanOption* best = nullptr;
  int best_priority = 0;
  for (const auto& option : desires) {
    if (attempted.contains(option.index)) continue;
    int p = table.lookup(option.instance);
    if (!best || p > best_priority) {
      best = &option;
      best_priority = p;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

StepOutcome execute_step(AgentState& st, Intention& in, Environment& env) {
  Frame& f = in.stack.back();
  const PlanStep step = f.instance.body[f.next_step++];
  bool ok = true;
  bool posted = false;

  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ActionStep>) {
          ActionCall call{s.name, {}, st.cycle_count};
          for (const auto& a : s.args) call.args.push_back(f.bindings.apply(a));
          ActionResult r = env.execute(call, st.beliefs);
          for (const auto& m : r.messages) st.log(m);
          post_belief_events(st, st.beliefs.update_from_percepts(r.percepts));
          if (r.status == ActionStatus::Unknown)
            st.log("unknown action " + s.name + "/" + std::to_string(s.args.size()));
          ok = r.status == ActionStatus::Ok;
        } else if constexpr (std::is_same_v<S, PrintStep>) {
          if (st.record_trace) {
            std::string line;
            for (const auto& a : s.args) line += f.bindings.apply(a).to_display();
            st.log(line);
          }
        } else if constexpr (std::is_same_v<S, AddBeliefStep>) {
          Literal l = s.literal.apply(f.bindings);
          if (!l.is_ground()) {
            ok = false;
            return;
          }
          post_belief_events(st, st.beliefs.add(l.with_annotation(source_annotation("self"))));
        } else if constexpr (std::is_same_v<S, RemoveBeliefStep>) {
          Literal pattern = s.literal.apply(f.bindings);
          auto sols = st.beliefs.query(pattern, f.bindings);
          if (sols.empty()) return;
          f.bindings = std::move(sols.front());
          post_belief_events(st, st.beliefs.remove(pattern.apply(f.bindings)));
        } else if constexpr (std::is_same_v<S, TestStep>) {
          auto sols = st.beliefs.query(s.literal.apply(f.bindings), f.bindings);
          if (sols.empty()) {
            ok = false;
            return;
          }
          f.bindings = std::move(sols.front());
        } else {
          Literal goal = s.literal.apply(f.bindings);
          f.awaiting = goal;
          st.events.push_back(
              PendingEvent{TriggerEvent{TriggerOp::Addition, TriggerKind::Achieve, std::move(goal)}, in.id, {}});
          in.status = IntentionStatus::Suspended;
          posted = true;
        }
      },
      step);

  if (!ok) {
    handle_failure(st, in);
    return StepOutcome::StepFailed;
  }
  if (posted) return StepOutcome::SubgoalPosted;
  settle(st, in);
  return in.stack.empty() ? StepOutcome::IntentionDone : StepOutcome::Ok;
}

void handle_failure(AgentState& st, Intention& in) {
  if (in.stack.empty()) return;
  Frame failed = std::move(in.stack.back());
  in.stack.pop_back();
  PendingEvent ev = std::move(failed.event);
  ev.attempted.insert(failed.plan_index);
  ev.intention = in.id;
  in.attempted_plans.insert(plan_key(failed.instance, failed.plan_index));
  in.status = IntentionStatus::Suspended;
  st.events.push_front(std::move(ev));
}

bool goal_achieved(const AgentState& state) { return !state.beliefs.query(state.goal).empty(); }

CycleResult reasoning_cycle(AgentState& st, Environment& env) {
  ++st.cycle_count;
  post_belief_events(st, st.beliefs.update_from_percepts(env.perceive()));
  if (goal_achieved(st)) return CycleResult::GoalAchieved;

  Intention* active = runnable(st);
  if (!active) {
    auto ev = select_event(st);
    if (!ev) return CycleResult::Exhausted;
    dispatch(st, std::move(*ev));
    active = runnable(st);
  }
  if (active) execute_step(st, *active, env);
  prune(st);
  return goal_achieved(st) ? CycleResult::GoalAchieved : CycleResult::Running;
}

RunOutcome run_agent(AgentState& state, Environment& env, std::uint64_t max_cycles) {
  for (;;) {
    if (state.cycle_count >= max_cycles) {
      state.log("cycle cap of " + std::to_string(max_cycles) + " reached");
      return RunOutcome::CycleCap;
    }
    switch (reasoning_cycle(state, env)) {
      case CycleResult::GoalAchieved: return RunOutcome::GoalAchieved;
      case CycleResult::Exhausted: return RunOutcome::Exhausted;
      case CycleResult::Running: break;
    }
  }
}

}  // namespace bdipt
