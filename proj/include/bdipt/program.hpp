#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bdipt/term.hpp"

namespace bdipt {

enum class TriggerOp : unsigned char { Addition, Deletion };
enum class TriggerKind : unsigned char { Belief, Achieve, Test };

/// `+l`, `-l`, `+!g`, `-!g`, `+?g`, `-?g`
struct TriggerEvent {
  TriggerOp op = TriggerOp::Addition;
  TriggerKind kind = TriggerKind::Belief;
  Literal literal;

  std::string to_string() const;
  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

enum class CompareOp : unsigned char { Unify, NotUnify, Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

std::string_view to_string(CompareOp op);

struct ContextFormula;
using ContextPtr = std::shared_ptr<const ContextFormula>;

/// Context condition tree. Evaluation never mutates the belief base.
struct ContextFormula {
  struct True {
    friend bool operator==(const True&, const True&) = default;
  };
  struct Cond {
    Literal literal;
    friend bool operator==(const Cond&, const Cond&) = default;
  };
  struct Compare {
    Term lhs;
    CompareOp op;
    Term rhs;
    friend bool operator==(const Compare&, const Compare&) = default;
  };
  struct And {
    ContextPtr lhs, rhs;
  };
  struct Or {
    ContextPtr lhs, rhs;
  };
  struct Not {
    ContextPtr operand;
  };

  std::variant<True, Cond, Compare, And, Or, Not> node;

  static ContextPtr make_true();
  static ContextPtr make_cond(Literal l);
  static ContextPtr make_compare(Term lhs, CompareOp op, Term rhs);
  static ContextPtr make_and(ContextPtr lhs, ContextPtr rhs);
  static ContextPtr make_or(ContextPtr lhs, ContextPtr rhs);
  static ContextPtr make_not(ContextPtr operand);

  bool is_true() const { return std::holds_alternative<True>(node); }
  std::string to_string() const;
};

/// Structural equality through the shared pointers.
bool equivalent(const ContextFormula& a, const ContextFormula& b);

struct ActionStep {
  std::string name;
  std::vector<Term> args;
  friend bool operator==(const ActionStep&, const ActionStep&) = default;
};
struct AchieveStep {
  Literal literal;
  friend bool operator==(const AchieveStep&, const AchieveStep&) = default;
};
struct TestStep {
  Literal literal;
  friend bool operator==(const TestStep&, const TestStep&) = default;
};
struct AddBeliefStep {
  Literal literal;
  friend bool operator==(const AddBeliefStep&, const AddBeliefStep&) = default;
};
struct RemoveBeliefStep {
  Literal literal;
  friend bool operator==(const RemoveBeliefStep&, const RemoveBeliefStep&) = default;
};
struct PrintStep {
  std::vector<Term> args;
  friend bool operator==(const PrintStep&, const PrintStep&) = default;
};

using PlanStep = std::variant<ActionStep, AchieveStep, TestStep, AddBeliefStep, RemoveBeliefStep, PrintStep>;

std::string to_string(const PlanStep& step);

struct Plan {
  std::optional<std::string> label;
  TriggerEvent trigger;
  ContextPtr context = ContextFormula::make_true();
  std::vector<PlanStep> body;
  int priority = 0;

  std::string to_string() const;
};

bool operator==(const Plan& a, const Plan& b);

struct AgentProgram {
  std::vector<Literal> initial_beliefs;
  std::vector<Literal> initial_goals;
  std::vector<Plan> plans;

  friend bool operator==(const AgentProgram&, const AgentProgram&) = default;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DuplicateLabelError : public std::runtime_error {
 public:
  explicit DuplicateLabelError(const std::string& label);
};

/// Parses the plan DSL.
///
///   program   := { statement }
///   statement := literal '.'                       initial belief (ground)
///              | '!' literal '.'                   initial goal
///              | [ '@' atom ] trigger [ ':' context ] [ '<-' body ] '.'
///   trigger   := ('+' | '-') [ '!' | '?' ] literal
///   literal   := [ '~' ] (atom | compound) [ '[' term {',' term} ']' ]
///   context   := conj { '|' conj } ;  conj := unary { '&' unary }
///   unary     := 'not' unary | '(' context ')' | 'true' | term cmp term | literal
///   cmp       := '=' | '\=' | '==' | '!=' | '\==' | '<' | '<=' | '>' | '>='
///   body      := step { ';' step }
///   step      := '!' literal | '?' literal | '+' literal | '-' literal
///              | '.print' '(' [ term {',' term} ] ')' | atom | compound
///
/// `//` starts a line comment. Dotted quads such as 192.168.0.10 lex as
/// strings. `_` is an anonymous variable, fresh at each occurrence.
AgentProgram parse_program(std::string_view source);

/// Parses a single term (used by the CLI and tests).
Term parse_term(std::string_view source);
Literal parse_literal(std::string_view source);

/// Canonical source text; reparses to an equal program.
std::string print_program(const AgentProgram& program);

}  // namespace bdipt
