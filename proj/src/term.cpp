#include "bdipt/term.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bdipt {

namespace {

int kind_rank(Term::Kind k) {
  switch (k) {
    case Term::Kind::Variable: return 0;
    case Term::Kind::Number: return 1;
    case Term::Kind::Atom: return 2;
    case Term::Kind::String: return 3;
    case Term::Kind::Compound: return 4;
  }
  return 5;
}

void render(const Term& t, std::string& out, bool display) {
  switch (t.kind()) {
    case Term::Kind::Variable:
    case Term::Kind::Atom:
      out += t.name();
      return;
    case Term::Kind::Number:
      out += format_number(t.value());
      return;
    case Term::Kind::String:
      out += display ? t.name() : quote_string(t.name());
      return;
    case Term::Kind::Compound: {
      out += t.name();
      out += '(';
      bool first = true;
      for (const auto& a : t.args()) {
        if (!first) out += ',';
        first = false;
        // nested strings keep their quotes even when displaying
        render(a, out, false);
      }
      out += ')';
      return;
    }
  }
}

bool occurs(const std::string& var, const Term& t, const Substitution& s) {
  const Term& w = s.walk(t);
  if (w.is_variable()) return w.name() == var;
  if (w.is_compound()) {
    for (const auto& a : w.args())
      if (occurs(var, a, s)) return true;
  }
  return false;
}

bool unify_into(const Term& a, const Term& b, Substitution& s) {
  const Term& x = s.walk(a);
  const Term& y = s.walk(b);
  if (x.is_variable() && y.is_variable() && x.name() == y.name()) return true;
  if (x.is_variable()) {
    if (occurs(x.name(), y, s)) return false;
    s.bind(x.name(), y);
    return true;
  }
  if (y.is_variable()) {
    if (occurs(y.name(), x, s)) return false;
    s.bind(y.name(), x);
    return true;
  }
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::Atom:
    case Term::Kind::String:
      return x.name() == y.name();
    case Term::Kind::Number:
      return x.value() == y.value();
    case Term::Kind::Compound: {
      if (x.name() != y.name() || x.arity() != y.arity()) return false;
      // copy the argument handles: walk() references may dangle once s grows
      const Term xs = x;
      const Term ys = y;
      for (std::size_t i = 0; i < xs.arity(); ++i)
        if (!unify_into(xs.args()[i], ys.args()[i], s)) return false;
      return true;
    }
    case Term::Kind::Variable:
      break;
  }
  return false;
}

}  // namespace

Term::Term() = default;

Term Term::variable(std::string name) {
  Term t;
  t.kind_ = Kind::Variable;
  t.text_ = std::move(name);
  return t;
}

Term Term::atom(std::string name) {
  Term t;
  t.kind_ = Kind::Atom;
  t.text_ = std::move(name);
  return t;
}

Term Term::number(double value) {
  Term t;
  t.kind_ = Kind::Number;
  t.text_.clear();
  t.number_ = value;
  return t;
}

Term Term::string(std::string text) {
  Term t;
  t.kind_ = Kind::String;
  t.text_ = std::move(text);
  return t;
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) return atom(std::move(functor));
  Term t;
  t.kind_ = Kind::Compound;
  t.text_ = std::move(functor);
  t.args_ = std::make_shared<const std::vector<Term>>(std::move(args));
  return t;
}

std::span<const Term> Term::args() const {
  if (!args_) return {};
  return {args_->data(), args_->size()};
}

bool Term::is_ground() const {
  if (is_variable()) return false;
  for (const auto& a : args())
    if (!a.is_ground()) return false;
  return true;
}

void Term::collect_variables(std::set<std::string>& out) const {
  if (is_variable()) {
    out.insert(text_);
    return;
  }
  for (const auto& a : args()) a.collect_variables(out);
}

std::string Term::to_string() const {
  std::string out;
  render(*this, out, false);
  return out;
}

std::string Term::to_display() const {
  std::string out;
  render(*this, out, true);
  return out;
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return kind_rank(a.kind_) <=> kind_rank(b.kind_);
  switch (a.kind_) {
    case Term::Kind::Number:
      if (a.number_ < b.number_) return std::strong_ordering::less;
      if (a.number_ > b.number_) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case Term::Kind::Variable:
    case Term::Kind::Atom:
    case Term::Kind::String:
      return a.text_ <=> b.text_;
    case Term::Kind::Compound: {
      if (auto c = a.arity() <=> b.arity(); c != 0) return c;
      if (auto c = a.text_ <=> b.text_; c != 0) return c;
      if (a.args_ == b.args_) return std::strong_ordering::equal;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (auto c = (*a.args_)[i] <=> (*b.args_)[i]; c != 0) return c;
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return {buf, end};
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

const Term* Substitution::find(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

const Term& Substitution::walk(const Term& t) const {
  const Term* cur = &t;
  while (cur->is_variable()) {
    const Term* next = find(cur->name());
    if (!next) break;
    cur = next;
  }
  return *cur;
}

Term Substitution::apply(const Term& t) const {
  const Term& w = walk(t);
  if (!w.is_compound()) return w;
  std::vector<Term> args;
  args.reserve(w.arity());
  for (const auto& a : w.args()) args.push_back(apply(a));
  return Term::compound(w.name(), std::move(args));
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, value] : bindings_) {
    if (!first) out += ", ";
    first = false;
    out += var + " -> " + apply(value).to_string();
  }
  return out + "}";
}

std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s) {
  if (!unify_into(a, b, s)) return std::nullopt;
  return s;
}

Literal::Literal(Term term, std::vector<Term> annotations, Polarity polarity)
    : term_(std::move(term)), annotations_(std::move(annotations)), polarity_(polarity) {
  if (!term_.is_structure())
    throw std::invalid_argument("literal must be an atom or compound, got " + term_.to_string());
  std::sort(annotations_.begin(), annotations_.end());
  annotations_.erase(std::unique(annotations_.begin(), annotations_.end()), annotations_.end());
}

bool Literal::is_ground() const {
  if (!term_.is_ground()) return false;
  return std::all_of(annotations_.begin(), annotations_.end(), [](const Term& a) { return a.is_ground(); });
}

void Literal::collect_variables(std::set<std::string>& out) const {
  term_.collect_variables(out);
  for (const auto& a : annotations_) a.collect_variables(out);
}

Literal Literal::with_annotation(const Term& annotation) const {
  return with_annotations(std::span<const Term>(&annotation, 1));
}

Literal Literal::with_annotations(std::span<const Term> extra) const {
  std::vector<Term> annots = annotations_;
  annots.insert(annots.end(), extra.begin(), extra.end());
  return Literal(term_, std::move(annots), polarity_);
}

Literal Literal::without_annotations() const { return Literal(term_, {}, polarity_); }

Literal Literal::apply(const Substitution& s) const {
  std::vector<Term> annots;
  annots.reserve(annotations_.size());
  for (const auto& a : annotations_) annots.push_back(s.apply(a));
  return Literal(s.apply(term_), std::move(annots), polarity_);
}

std::string Literal::to_string() const {
  std::string out = negated() ? "~" : "";
  out += term_.to_string();
  if (!annotations_.empty()) {
    out += '[';
    for (std::size_t i = 0; i < annotations_.size(); ++i) {
      if (i) out += ',';
      out += annotations_[i].to_string();
    }
    out += ']';
  }
  return out;
}

std::vector<Substitution> match_literal(const Literal& pattern, const Literal& fact, const Substitution& s) {
  std::vector<Substitution> out;
  if (pattern.polarity() != fact.polarity()) return out;
  auto base = unify(pattern.term(), fact.term(), s);
  if (!base) return out;

  const auto& want = pattern.annotations();
  const auto& have = fact.annotations();
  std::function<void(std::size_t, const Substitution&)> step = [&](std::size_t i, const Substitution& cur) {
    if (i == want.size()) {
      out.push_back(cur);
      return;
    }
    for (const auto& h : have)
      if (auto next = unify(want[i], h, cur)) step(i + 1, *next);
  };
  step(0, *base);
  return out;
}

Term rename_variables(const Term& t, std::string_view suffix) {
  if (t.is_variable()) return Term::variable(t.name() + std::string(suffix));
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(rename_variables(a, suffix));
  return Term::compound(t.name(), std::move(args));
}

Literal rename_variables(const Literal& l, std::string_view suffix) {
  std::vector<Term> annots;
  for (const auto& a : l.annotations()) annots.push_back(rename_variables(a, suffix));
  return Literal(rename_variables(l.term(), suffix), std::move(annots), l.polarity());
}

Term source_annotation(std::string_view who) {
  return Term::compound("source", {Term::atom(std::string(who))});
}

}  // namespace bdipt
