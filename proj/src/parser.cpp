#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_set>

#include "bdipt/program.hpp"

namespace bdipt {

namespace {

enum class Tok {
  End,
  Ident,     // lowercase identifier
  Variable,  // uppercase or '_' identifier
  Number,
  String,
  Internal,  // .print
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  Period,
  Colon,
  Arrow,
  At,
  Plus,
  Minus,
  Bang,
  Question,
  Amp,
  Bar,
  Tilde,
  Compare,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Variable: return "variable '" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    case Tok::String: return "string \"" + t.text + "\"";
    case Tok::Internal: return "internal action '." + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, col_, msg); }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
        continue;
      }
      return;
    }
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string read_ident() {
    std::string s;
    while (ident_char(peek())) {
      s += peek();
      advance();
    }
    return s;
  }

  std::string read_digits() {
    std::string s;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      s += peek();
      advance();
    }
    return s;
  }

  void lex_number(Token& t) {
    std::vector<std::string> parts{read_digits()};
    while (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      advance();
      parts.push_back(read_digits());
    }
    if (parts.size() == 4) {
      t.type = Tok::String;
      t.text = parts[0] + "." + parts[1] + "." + parts[2] + "." + parts[3];
      return;
    }
    if (parts.size() > 2) fail("malformed number or address");
    t.type = Tok::Number;
    t.text = parts.size() == 2 ? parts[0] + "." + parts[1] : parts[0];
    std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
  }

  void lex_string(Token& t) {
    advance();  // opening quote
    std::string s;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated string");
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        if (pos_ >= src_.size()) fail("unterminated string");
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          default: s += e;
        }
        advance();
        continue;
      }
      s += c;
      advance();
    }
    t.type = Tok::String;
    t.text = std::move(s);
  }

  bool internal_allowed() const {
    if (pos_ == 0) return true;
    char prev = src_[pos_ - 1];
    return std::isspace(static_cast<unsigned char>(prev)) || prev == ';' || prev == '-' || prev == ':';
  }

  void punct(Token& t, Tok type, std::size_t len) {
    t.type = type;
    t.text = std::string(src_.substr(pos_, len));
    for (std::size_t i = 0; i < len; ++i) advance();
  }

  void lex_one(Token& t) {
    char c = peek();
    if (std::islower(static_cast<unsigned char>(c))) {
      t.type = Tok::Ident;
      t.text = read_ident();
      return;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      t.type = Tok::Variable;
      t.text = read_ident();
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(t);
    if (c == '"') return lex_string(t);

    char n = peek(1);
    switch (c) {
      case '.':
        if (std::islower(static_cast<unsigned char>(n)) && internal_allowed()) {
          advance();
          t.type = Tok::Internal;
          t.text = read_ident();
          return;
        }
        return punct(t, Tok::Period, 1);
      case '(': return punct(t, Tok::LParen, 1);
      case ')': return punct(t, Tok::RParen, 1);
      case '[': return punct(t, Tok::LBracket, 1);
      case ']': return punct(t, Tok::RBracket, 1);
      case ',': return punct(t, Tok::Comma, 1);
      case ';': return punct(t, Tok::Semicolon, 1);
      case ':': return punct(t, Tok::Colon, 1);
      case '@': return punct(t, Tok::At, 1);
      case '+': return punct(t, Tok::Plus, 1);
      case '-': return punct(t, Tok::Minus, 1);
      case '?': return punct(t, Tok::Question, 1);
      case '&': return punct(t, Tok::Amp, 1);
      case '|': return punct(t, Tok::Bar, 1);
      case '~': return punct(t, Tok::Tilde, 1);
      case '!':
        if (n == '=') return punct(t, Tok::Compare, 2);
        return punct(t, Tok::Bang, 1);
      case '<':
        if (n == '-') return punct(t, Tok::Arrow, 2);
        if (n == '=') return punct(t, Tok::Compare, 2);
        return punct(t, Tok::Compare, 1);
      case '>':
        if (n == '=') return punct(t, Tok::Compare, 2);
        return punct(t, Tok::Compare, 1);
      case '=':
        if (n == '=') return punct(t, Tok::Compare, 2);
        return punct(t, Tok::Compare, 1);
      case '\\':
        if (n == '=' && peek(2) == '=') return punct(t, Tok::Compare, 3);
        if (n == '=') return punct(t, Tok::Compare, 2);
        break;
      default:
        break;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

CompareOp compare_op(const std::string& text) {
  if (text == "=") return CompareOp::Unify;
  if (text == "\\=") return CompareOp::NotUnify;
  if (text == "<") return CompareOp::Less;
  if (text == "<=") return CompareOp::LessEq;
  if (text == ">") return CompareOp::Greater;
  if (text == ">=") return CompareOp::GreaterEq;
  if (text == "==") return CompareOp::Equal;
  return CompareOp::NotEqual;  // "!=" and "\=="
}

/// Variables a context binds when it succeeds (negated parts bind nothing).
void context_binds(const ContextFormula& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ContextFormula::Cond>) {
          n.literal.collect_variables(out);
        } else if constexpr (std::is_same_v<N, ContextFormula::Compare>) {
          if (n.op == CompareOp::Unify) {
            n.lhs.collect_variables(out);
            n.rhs.collect_variables(out);
          }
        } else if constexpr (std::is_same_v<N, ContextFormula::And>) {
          context_binds(*n.lhs, out);
          context_binds(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, ContextFormula::Or>) {
          std::set<std::string> l, r;
          context_binds(*n.lhs, l);
          context_binds(*n.rhs, r);
          std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
        }
      },
      f.node);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AgentProgram program() {
    AgentProgram prog;
    std::unordered_set<std::string> labels;
    while (!at(Tok::End)) {
      if (at(Tok::At) || at(Tok::Plus) || at(Tok::Minus)) {
        Plan p = plan();
        if (p.label) {
          if (!labels.insert(*p.label).second) throw DuplicateLabelError(*p.label);
        }
        prog.plans.push_back(std::move(p));
      } else if (at(Tok::Bang)) {
        next();
        prog.initial_goals.push_back(literal());
        expect(Tok::Period, "'.' after initial goal");
      } else {
        const Token& start = cur();
        Literal l = literal();
        if (!l.is_ground()) throw SyntaxError(start.line, start.column, "initial belief must be ground: " + l.to_string());
        prog.initial_beliefs.push_back(std::move(l));
        expect(Tok::Period, "'.' after initial belief");
      }
    }
    return prog;
  }

  Term single_term() {
    Term t = term();
    expect(Tok::End, "end of input");
    return t;
  }

  Literal single_literal() {
    Literal l = literal();
    expect(Tok::End, "end of input");
    return l;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k = 1) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return cur().type == t; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    throw SyntaxError(cur().line, cur().column, "expected " + what + ", found " + describe(cur()));
  }

  const Token& expect(Tok t, const std::string& what) {
    if (!at(t)) fail_expected(what);
    return next();
  }

  Term variable_term(const std::string& name) {
    if (name == "_") return Term::variable("_" + std::to_string(++anon_));
    return Term::variable(name);
  }

  Term term() {
    const Token& t = cur();
    switch (t.type) {
      case Tok::Variable:
        next();
        return variable_term(t.text);
      case Tok::Number:
        next();
        return Term::number(t.number);
      case Tok::String:
        next();
        return Term::string(t.text);
      case Tok::Minus:
        if (ahead().type == Tok::Number) {
          next();
          return Term::number(-next().number);
        }
        break;
      case Tok::Ident: {
        std::string name = next().text;
        if (!at(Tok::LParen)) return Term::atom(std::move(name));
        next();
        std::vector<Term> args = term_list(Tok::RParen);
        expect(Tok::RParen, "')'");
        if (args.empty()) fail_expected("argument");
        return Term::compound(std::move(name), std::move(args));
      }
      default:
        break;
    }
    fail_expected("term");
  }

  std::vector<Term> term_list(Tok close) {
    std::vector<Term> out;
    if (at(close)) return out;
    out.push_back(term());
    while (at(Tok::Comma)) {
      next();
      out.push_back(term());
    }
    return out;
  }

  std::vector<Term> annotations() {
    std::vector<Term> out;
    if (!at(Tok::LBracket)) return out;
    next();
    out = term_list(Tok::RBracket);
    expect(Tok::RBracket, "']'");
    return out;
  }

  Literal literal_from(const Token& start, Term t, Polarity pol) {
    if (!t.is_structure())
      throw SyntaxError(start.line, start.column, "a literal must be an atom or compound, found " + t.to_string());
    return Literal(std::move(t), annotations(), pol);
  }

  Literal literal() {
    Polarity pol = Polarity::Positive;
    if (at(Tok::Tilde)) {
      next();
      pol = Polarity::Negated;
    }
    const Token& start = cur();
    if (!at(Tok::Ident)) fail_expected("literal");
    return literal_from(start, term(), pol);
  }

  TriggerEvent trigger() {
    TriggerEvent ev;
    ev.op = next().type == Tok::Plus ? TriggerOp::Addition : TriggerOp::Deletion;
    if (at(Tok::Bang)) {
      next();
      ev.kind = TriggerKind::Achieve;
    } else if (at(Tok::Question)) {
      next();
      ev.kind = TriggerKind::Test;
    }
    ev.literal = literal();
    return ev;
  }

  ContextPtr context() {
    ContextPtr lhs = conjunction();
    while (at(Tok::Bar)) {
      next();
      lhs = ContextFormula::make_or(lhs, conjunction());
    }
    return lhs;
  }

  ContextPtr conjunction() {
    ContextPtr lhs = unary();
    while (at(Tok::Amp)) {
      next();
      lhs = ContextFormula::make_and(lhs, unary());
    }
    return lhs;
  }

  ContextPtr unary() {
    if (at(Tok::Ident) && cur().text == "not") {
      next();
      return ContextFormula::make_not(unary());
    }
    if (at(Tok::LParen)) {
      next();
      ContextPtr inner = context();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (at(Tok::Ident) && cur().text == "true" && ahead().type != Tok::LParen && ahead().type != Tok::Compare) {
      next();
      return ContextFormula::make_true();
    }
    Polarity pol = Polarity::Positive;
    if (at(Tok::Tilde)) {
      next();
      pol = Polarity::Negated;
    }
    const Token& start = cur();
    Term lhs = term();
    if (pol == Polarity::Positive && at(Tok::Compare)) {
      CompareOp op = compare_op(next().text);
      return ContextFormula::make_compare(std::move(lhs), op, term());
    }
    return ContextFormula::make_cond(literal_from(start, std::move(lhs), pol));
  }

  PlanStep step() {
    const Token& start = cur();
    switch (start.type) {
      case Tok::Bang:
        next();
        return AchieveStep{literal()};
      case Tok::Question:
        next();
        return TestStep{literal()};
      case Tok::Plus:
        next();
        return AddBeliefStep{literal()};
      case Tok::Minus:
        next();
        return RemoveBeliefStep{literal()};
      case Tok::Internal: {
        if (start.text != "print")
          throw SyntaxError(start.line, start.column, "unknown internal action '." + start.text + "'");
        next();
        expect(Tok::LParen, "'(' after .print");
        std::vector<Term> args = term_list(Tok::RParen);
        expect(Tok::RParen, "')'");
        return PrintStep{std::move(args)};
      }
      case Tok::Ident: {
        Term t = term();
        return ActionStep{t.name(), std::vector<Term>(t.args().begin(), t.args().end())};
      }
      default:
        fail_expected("plan body step");
    }
  }

  Plan plan() {
    const Token& start = cur();
    Plan p;
    if (at(Tok::At)) {
      next();
      p.label = expect(Tok::Ident, "plan label").text;
    }
    if (!at(Tok::Plus) && !at(Tok::Minus)) fail_expected("trigger event");
    p.trigger = trigger();
    if (at(Tok::Colon)) {
      next();
      p.context = context();
    }
    if (at(Tok::Arrow)) {
      next();
      p.body.push_back(step());
      while (at(Tok::Semicolon)) {
        next();
        p.body.push_back(step());
      }
    }
    expect(Tok::Period, "'.' at end of plan");
    check_bound(p, start);
    return p;
  }

  static void check_bound(const Plan& p, const Token& start) {
    std::set<std::string> bound;
    p.trigger.literal.collect_variables(bound);
    context_binds(*p.context, bound);
    auto require = [&](const std::set<std::string>& used) {
      for (const auto& v : used)
        if (!bound.contains(v))
          throw SyntaxError(start.line, start.column, "variable " + v + " is not bound before use in plan body");
    };
    for (const auto& s : p.body) {
      std::set<std::string> used;
      std::visit(
          [&](const auto& st) {
            using S = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<S, ActionStep> || std::is_same_v<S, PrintStep>) {
              for (const auto& a : st.args) a.collect_variables(used);
              require(used);
            } else if constexpr (std::is_same_v<S, AddBeliefStep>) {
              st.literal.collect_variables(used);
              require(used);
            } else {
              st.literal.collect_variables(bound);
            }
          },
          s);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int anon_ = 0;
};

// Printing precedence: or < and < not < atomic.
int precedence(const ContextFormula& f) {
  if (std::holds_alternative<ContextFormula::Or>(f.node)) return 1;
  if (std::holds_alternative<ContextFormula::And>(f.node)) return 2;
  if (std::holds_alternative<ContextFormula::Not>(f.node)) return 3;
  return 4;
}

void print_context(const ContextFormula& f, int min_prec, std::string& out) {
  bool parens = precedence(f) < min_prec;
  if (parens) out += '(';
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ContextFormula::True>) {
          out += "true";
        } else if constexpr (std::is_same_v<N, ContextFormula::Cond>) {
          out += n.literal.to_string();
        } else if constexpr (std::is_same_v<N, ContextFormula::Compare>) {
          out += n.lhs.to_string();
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          out += n.rhs.to_string();
        } else if constexpr (std::is_same_v<N, ContextFormula::And>) {
          print_context(*n.lhs, 2, out);
          out += " & ";
          print_context(*n.rhs, 3, out);
        } else if constexpr (std::is_same_v<N, ContextFormula::Or>) {
          print_context(*n.lhs, 1, out);
          out += " | ";
          print_context(*n.rhs, 2, out);
        } else {
          out += "not ";
          print_context(*n.operand, 3, out);
        }
      },
      f.node);
  if (parens) out += ')';
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += ts[i].to_string();
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

DuplicateLabelError::DuplicateLabelError(const std::string& label)
    : std::runtime_error("duplicate plan label @" + label) {}

std::string TriggerEvent::to_string() const {
  std::string out = op == TriggerOp::Addition ? "+" : "-";
  if (kind == TriggerKind::Achieve) out += '!';
  if (kind == TriggerKind::Test) out += '?';
  return out + literal.to_string();
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Unify: return "=";
    case CompareOp::NotUnify: return "\\=";
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Equal: return "==";
    case CompareOp::NotEqual: return "!=";
  }
  return "?";
}

ContextPtr ContextFormula::make_true() { return std::make_shared<const ContextFormula>(ContextFormula{True{}}); }
ContextPtr ContextFormula::make_cond(Literal l) {
  return std::make_shared<const ContextFormula>(ContextFormula{Cond{std::move(l)}});
}
ContextPtr ContextFormula::make_compare(Term lhs, CompareOp op, Term rhs) {
  return std::make_shared<const ContextFormula>(ContextFormula{Compare{std::move(lhs), op, std::move(rhs)}});
}
ContextPtr ContextFormula::make_and(ContextPtr lhs, ContextPtr rhs) {
  return std::make_shared<const ContextFormula>(ContextFormula{And{std::move(lhs), std::move(rhs)}});
}
ContextPtr ContextFormula::make_or(ContextPtr lhs, ContextPtr rhs) {
  return std::make_shared<const ContextFormula>(ContextFormula{Or{std::move(lhs), std::move(rhs)}});
}
ContextPtr ContextFormula::make_not(ContextPtr operand) {
  return std::make_shared<const ContextFormula>(ContextFormula{Not{std::move(operand)}});
}

std::string ContextFormula::to_string() const {
  std::string out;
  print_context(*this, 0, out);
  return out;
}

bool equivalent(const ContextFormula& a, const ContextFormula& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, ContextFormula::And> || std::is_same_v<N, ContextFormula::Or>) {
          return equivalent(*x.lhs, *y.lhs) && equivalent(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<N, ContextFormula::Not>) {
          return equivalent(*x.operand, *y.operand);
        } else {
          return x == y;
        }
      },
      a.node);
}

std::string to_string(const PlanStep& step) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ActionStep>) {
          if (s.args.empty()) return s.name;
          return s.name + "(" + join_terms(s.args) + ")";
        } else if constexpr (std::is_same_v<S, AchieveStep>) {
          return "!" + s.literal.to_string();
        } else if constexpr (std::is_same_v<S, TestStep>) {
          return "?" + s.literal.to_string();
        } else if constexpr (std::is_same_v<S, AddBeliefStep>) {
          return "+" + s.literal.to_string();
        } else if constexpr (std::is_same_v<S, RemoveBeliefStep>) {
          return "-" + s.literal.to_string();
        } else {
          return ".print(" + join_terms(s.args) + ")";
        }
      },
      step);
}

std::string Plan::to_string() const {
  std::string out;
  if (label) out += "@" + *label + "\n";
  out += trigger.to_string();
  out += " : " + context->to_string();
  for (std::size_t i = 0; i < body.size(); ++i) {
    out += i == 0 ? "\n   <- " : ";\n      ";
    out += bdipt::to_string(body[i]);
  }
  return out + ".";
}

bool operator==(const Plan& a, const Plan& b) {
  return a.label == b.label && a.trigger == b.trigger && equivalent(*a.context, *b.context) && a.body == b.body &&
         a.priority == b.priority;
}

AgentProgram parse_program(std::string_view source) { return Parser(Lexer(source).run()).program(); }

Term parse_term(std::string_view source) { return Parser(Lexer(source).run()).single_term(); }

Literal parse_literal(std::string_view source) { return Parser(Lexer(source).run()).single_literal(); }

std::string print_program(const AgentProgram& program) {
  std::string out;
  for (const auto& b : program.initial_beliefs) out += b.to_string() + ".\n";
  for (const auto& g : program.initial_goals) out += "!" + g.to_string() + ".\n";
  for (const auto& p : program.plans) out += "\n" + p.to_string() + "\n";
  return out;
}

}  // namespace bdipt
