#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdipt {

/// Prolog-style logic term. Immutable; compound arguments are shared, so
/// copies are cheap and safe to hand across threads.
class Term {
 public:
  enum class Kind : unsigned char { Variable, Atom, Number, String, Compound };

  Term();  // the atom `nil`

  static Term variable(std::string name);
  static Term atom(std::string name);
  static Term number(double value);
  static Term string(std::string text);
  /// An empty argument list yields a plain atom.
  static Term compound(std::string functor, std::vector<Term> args);

  Kind kind() const { return kind_; }
  bool is_variable() const { return kind_ == Kind::Variable; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_number() const { return kind_ == Kind::Number; }
  bool is_string() const { return kind_ == Kind::String; }
  bool is_compound() const { return kind_ == Kind::Compound; }
  /// Atom or compound: something that can head a literal.
  bool is_structure() const { return is_atom() || is_compound(); }

  /// Variable name, atom name, functor, or string text.
  const std::string& name() const { return text_; }
  double value() const { return number_; }
  std::span<const Term> args() const;
  std::size_t arity() const { return args_ ? args_->size() : 0; }

  bool is_ground() const;
  void collect_variables(std::set<std::string>& out) const;

  /// Source-syntax rendering (strings quoted and escaped).
  std::string to_string() const;
  /// Rendering used by `.print`: strings bare, everything else as source.
  std::string to_display() const;

  friend bool operator==(const Term& a, const Term& b);
  /// Standard order: Variable < Number < Atom < String < Compound, then by
  /// value / name / (arity, functor, args).
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  Kind kind_ = Kind::Atom;
  std::string text_ = "nil";
  double number_ = 0.0;
  std::shared_ptr<const std::vector<Term>> args_;
};

std::string format_number(double v);
std::string quote_string(std::string_view text);

/// Variable bindings in triangular form; `apply` resolves chains fully.
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const Term* find(const std::string& var) const;
  void bind(const std::string& var, Term value) { bindings_.insert_or_assign(var, std::move(value)); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  /// Follows variable bindings until a non-variable or unbound variable.
  const Term& walk(const Term& t) const;
  Term apply(const Term& t) const;

  std::string to_string() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> bindings_;
};

/// Most general unifier extending `s`, with occurs check. Returns nullopt on
/// clash or occurs-check violation.
std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s = {});

inline Term apply_substitution(const Substitution& s, const Term& t) { return s.apply(t); }

enum class Polarity : unsigned char { Positive, Negated };

/// A term used as a belief, goal, or trigger, plus its annotation set.
class Literal {
 public:
  Literal() = default;
  /// Throws std::invalid_argument if `term` is not an atom or compound.
  explicit Literal(Term term, std::vector<Term> annotations = {}, Polarity polarity = Polarity::Positive);

  const Term& term() const { return term_; }
  Polarity polarity() const { return polarity_; }
  bool negated() const { return polarity_ == Polarity::Negated; }
  /// Sorted, duplicate-free.
  const std::vector<Term>& annotations() const { return annotations_; }

  const std::string& functor() const { return term_.name(); }
  std::size_t arity() const { return term_.arity(); }

  bool is_ground() const;
  void collect_variables(std::set<std::string>& out) const;

  Literal with_annotation(const Term& annotation) const;
  Literal with_annotations(std::span<const Term> extra) const;
  Literal without_annotations() const;
  Literal apply(const Substitution& s) const;

  /// `~f(a)[x,y]`
  std::string to_string() const;

  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  Term term_;
  std::vector<Term> annotations_;
  Polarity polarity_ = Polarity::Positive;
};

/// Unifies `pattern` against `fact`: terms and polarity must unify, and every
/// annotation of `pattern` must unify with some annotation of `fact`.
/// Returns every solution, in a deterministic order.
std::vector<Substitution> match_literal(const Literal& pattern, const Literal& fact, const Substitution& s);

/// Consistently renames every variable by appending `suffix`.
Term rename_variables(const Term& t, std::string_view suffix);
Literal rename_variables(const Literal& l, std::string_view suffix);

Term source_annotation(std::string_view who);

}  // namespace bdipt
