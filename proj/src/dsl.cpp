#include "epiplan/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace epiplan {

std::string Diagnostic::format() const {
  return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
}

namespace {

std::string join(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.format();
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok : std::uint8_t { Ident, Int, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  bool spaced = true;  // whitespace precedes the token
};

// Thrown internally to abort a parse after the first syntax error.
struct Abort {};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file, std::vector<Diagnostic>& diags)
      : src_(src), file_(std::move(file)), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool spaced = true;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
        advance();
        spaced = true;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      Token t;
      t.line = line_;
      t.column = col_;
      t.spaced = spaced;
      spaced = false;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
      } else if (c == '"') {
        t.kind = Tok::String;
        advance();
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') t.text += advance();
        if (pos_ >= src_.size() || src_[pos_] != '"') {
          diags_.push_back({{file_, t.line, t.column, col_}, "unterminated string"});
          continue;
        }
        advance();
      } else if (auto p = punct()) {
        t.kind = Tok::Punct;
        t.text = *p;
        for (std::size_t i = 0; i < p->size(); ++i) advance();
      } else {
        diags_.push_back({{file_, line_, col_, col_ + 1}, std::string("unexpected character '") + c + "'"});
        advance();
        continue;
      }
      out.push_back(std::move(t));
    }
    Token end;
    end.line = line_;
    end.column = col_;
    out.push_back(end);
    return out;
  }

 private:
  std::optional<std::string> punct() const {
    static const char* const multi[] = {":=", "!=", "<=", ">=", ".."};
    for (const char* m : multi)
      if (src_.substr(pos_, 2) == m) return std::string(m);
    static const std::string single = "{}()[],:=<>@+-;";
    if (single.find(src_[pos_]) != std::string::npos) return std::string(1, src_[pos_]);
    return std::nullopt;
  }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string_view src_;
  std::string file_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------- raw syntax

struct Name {
  std::string text;
  SourceSpan span;
};

struct RawTerm {
  std::optional<Name> ident;  // otherwise a literal
  Value literal;
  SourceSpan span;
};

struct RawFormula {
  enum class Kind : std::uint8_t { Rel, Not, And, Sees, Knows, Group };
  Kind kind = Kind::Rel;
  SourceSpan span;
  std::string rel;
  std::vector<RawTerm> args;
  std::vector<Name> agents;
  GroupMode mode = GroupMode::Everyone;
  bool knowledge = false;
  std::optional<Name> bare;
  std::vector<RawFormula> subs;
};

struct RawValue {
  std::optional<Name> ident;
  Value literal;
  SourceSpan span;
};

struct RawDomain {
  enum class Kind : std::uint8_t { Range, Bool, Set } kind = Kind::Range;
  std::int64_t lo = 0, hi = 0;
  std::vector<RawValue> values;
  SourceSpan span;
};

struct RawAnchor {
  enum class Kind : std::uint8_t { None, Pos, Room, Page } kind = Kind::None;
  std::vector<RawTerm> terms;
};

struct RawVar {
  Name name;
  bool constant = false;
  RawDomain domain;
  RawAnchor anchor;
  std::optional<RawValue> initial;
};

struct RawEffect {
  std::optional<RawFormula> cond;
  Name target;
  std::vector<std::pair<bool, RawTerm>> terms;
};

struct RawParam {
  Name name;
  RawDomain domain;
};

struct RawOperator {
  Name name;
  std::vector<RawParam> params;
  RawFormula pre;
  std::vector<RawEffect> effects;
};

struct RawProblem {
  std::string name;
  SourceSpan head;
  std::vector<Name> agents;
  std::optional<std::pair<Name, std::vector<std::pair<Name, RawValue>>>> perspective;
  std::vector<RawVar> vars;
  std::vector<RawOperator> operators;
  std::vector<std::pair<Name, RawValue>> init;
  std::vector<RawFormula> goals;
  std::vector<RawFormula> maintain;
};

// ---------------------------------------------------------------- parser

const std::set<std::string, std::less<>> kTopKeywords = {"problem", "agents", "perspective", "var",  "const",
                                                         "operator", "goal",  "maintain",    "init"};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), file_(std::move(file)), diags_(diags) {}

  RawProblem problem() {
    RawProblem p;
    p.head = span(peek());
    expect_word("problem");
    if (peek().kind != Tok::String) fail(peek(), "expected problem name string");
    p.name = next().text;
    const bool braced = accept("{");
    while (!(braced && is("}")) && peek().kind != Tok::End) item(p);
    if (braced) expect("}");
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after problem");
    return p;
  }

  RawFormula lone_formula() {
    RawFormula f = formula();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after formula");
    return f;
  }

 private:
  void item(RawProblem& p) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, "expected a declaration, got '" + t.text + "'");
    if (t.text == "agents") {
      next();
      if (peek().kind != Tok::Ident || kTopKeywords.count(peek().text)) fail(peek(), "expected agent names");
      while (peek().kind == Tok::Ident && !kTopKeywords.count(peek().text)) p.agents.push_back(name());
    } else if (t.text == "perspective") {
      if (p.perspective) fail(t, "duplicate perspective declaration");
      next();
      Name kind = name();
      // Kinds may contain dashes, e.g. latched-rooms.
      while (is("-") && !peek().spaced && peek(1).kind == Tok::Ident && !peek(1).spaced) {
        next();
        kind.text += "-" + next().text;
      }
      std::vector<std::pair<Name, RawValue>> params;
      expect("{");
      while (!is("}")) {
        Name key = name();
        expect(":");
        params.emplace_back(std::move(key), value());
        accept(",");
      }
      expect("}");
      p.perspective.emplace(std::move(kind), std::move(params));
    } else if (t.text == "var" || t.text == "const") {
      RawVar v;
      v.constant = next().text == "const";
      v.name = name();
      expect(":");
      v.domain = domain();
      if (is("@")) v.anchor = anchor();
      if (v.constant || is("=")) {
        expect("=");
        v.initial = value();
      }
      p.vars.push_back(std::move(v));
    } else if (t.text == "operator") {
      next();
      p.operators.push_back(op());
    } else if (t.text == "goal" || t.text == "maintain") {
      const bool goal = next().text == "goal";
      expect(":");
      (goal ? p.goals : p.maintain).push_back(formula());
    } else if (t.text == "init") {
      next();
      expect("{");
      while (!is("}")) {
        Name target = name();
        expect("=");
        p.init.emplace_back(std::move(target), value());
        accept(",");
      }
      expect("}");
    } else {
      fail(t, "unknown declaration '" + t.text + "'");
    }
  }

  RawOperator op() {
    RawOperator o;
    o.name = name();
    expect("(");
    if (!is(")")) {
      do {
        RawParam param;
        param.name = name();
        expect(":");
        param.domain = domain();
        if (param.domain.kind == RawDomain::Kind::Bool) fail(peek(), "operator parameters take a range or a value set");
        o.params.push_back(std::move(param));
      } while (accept(","));
    }
    expect(")");
    expect("{");
    expect_word("pre");
    expect(":");
    o.pre = formula();
    expect_word("eff");
    expect(":");
    while (!is("}")) {
      RawEffect e;
      if (is_word("when")) {
        next();
        e.cond = formula();
        expect_word("then");
      }
      e.target = name();
      expect(":=");
      e.terms = expr();
      o.effects.push_back(std::move(e));
      if (!accept(";")) accept(",");
    }
    if (o.effects.empty()) fail(peek(), "operator " + o.name.text + " needs at least one effect");
    expect("}");
    return o;
  }

  std::vector<std::pair<bool, RawTerm>> expr() {
    std::vector<std::pair<bool, RawTerm>> terms;
    bool negative = false;
    if (is("-") && peek(1).kind != Tok::Int) {
      next();
      negative = true;
    }
    terms.emplace_back(negative, term());
    while (is("+") || is("-")) {
      negative = next().text == "-";
      terms.emplace_back(negative, term());
    }
    return terms;
  }

  RawDomain domain() {
    RawDomain d;
    d.span = span(peek());
    if (is_word("bool")) {
      next();
      d.kind = RawDomain::Kind::Bool;
    } else if (accept("{")) {
      d.kind = RawDomain::Kind::Set;
      do {
        d.values.push_back(value());
        accept(",");
      } while (!is("}"));
      expect("}");
    } else {
      d.kind = RawDomain::Kind::Range;
      d.lo = integer();
      expect("..");
      d.hi = integer();
    }
    return d;
  }

  RawAnchor anchor() {
    expect("@");
    RawAnchor a;
    const Token& kind = peek();
    if (is_word("pos")) {
      next();
      a.kind = RawAnchor::Kind::Pos;
      expect("(");
      a.terms.push_back(term());
      expect(",");
      a.terms.push_back(term());
      expect(")");
    } else if (is_word("room")) {
      next();
      a.kind = RawAnchor::Kind::Room;
      expect("(");
      a.terms.push_back(term());
      expect(")");
    } else if (is_word("page")) {
      next();
      a.kind = RawAnchor::Kind::Page;
    } else {
      fail(kind, "expected anchor pos, room or page");
    }
    return a;
  }

  std::int64_t integer() {
    const bool negative = accept("-");
    if (peek().kind != Tok::Int) fail(peek(), "expected an integer");
    const Token& t = next();
    try {
      const std::int64_t v = std::stoll(t.text);
      return negative ? -v : v;
    } catch (const std::out_of_range&) {
      fail(t, "integer out of range");
    }
  }

  RawValue value() {
    RawValue v;
    v.span = span(peek());
    if (peek().kind == Tok::Int || is("-")) {
      v.literal = Value::integer(integer());
    } else if (is_word("true") || is_word("false")) {
      v.literal = Value::boolean(next().text == "true");
    } else if (peek().kind == Tok::Ident) {
      v.ident = name();
    } else {
      fail(peek(), "expected a value");
    }
    return v;
  }

  RawTerm term() {
    RawTerm t;
    t.span = span(peek());
    if (peek().kind == Tok::Int || (is("-") && peek(1).kind == Tok::Int)) {
      t.literal = Value::integer(integer());
    } else if (is_word("true") || is_word("false")) {
      t.literal = Value::boolean(next().text == "true");
    } else if (peek().kind == Tok::Ident) {
      t.ident = name();
    } else {
      fail(peek(), "expected a variable or literal, got '" + describe(peek()) + "'");
    }
    return t;
  }

  RawFormula formula() {
    RawFormula lhs = unary();
    while (is_word("and")) {
      const SourceSpan at = span(next());
      RawFormula node;
      node.kind = RawFormula::Kind::And;
      node.span = at;
      node.subs.push_back(std::move(lhs));
      node.subs.push_back(unary());
      lhs = std::move(node);
    }
    return lhs;
  }

  static bool modal(const Token& t) {
    static const std::set<std::string, std::less<>> ops = {"S", "K", "ES", "EK", "DS", "DK", "CS", "CK"};
    return t.kind == Tok::Ident && ops.count(t.text);
  }

  bool starts_operator() const { return modal(peek()) && peek(1).kind == Tok::Punct && peek(1).text == "["; }

  RawFormula unary() {
    RawFormula f;
    f.span = span(peek());
    if (is_word("not")) {
      next();
      f.kind = RawFormula::Kind::Not;
      f.subs.push_back(unary());
      return f;
    }
    if (accept("(")) {
      RawFormula inner = formula();
      expect(")");
      return inner;
    }
    if (starts_operator()) {
      const std::string op = next().text;
      expect("[");
      do f.agents.push_back(name());
      while (accept(","));
      expect("]");
      if (op == "S" || op == "K") {
        if (f.agents.size() != 1) fail_at(f.span, op + " takes exactly one agent");
        f.kind = op == "S" ? RawFormula::Kind::Sees : RawFormula::Kind::Knows;
        if (op == "S")
          target(f);
        else
          f.subs.push_back(unary());
        return f;
      }
      f.kind = RawFormula::Kind::Group;
      f.mode = op[0] == 'E' ? GroupMode::Everyone : op[0] == 'D' ? GroupMode::Distributed : GroupMode::Common;
      f.knowledge = op[1] == 'K';
      target(f);
      return f;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == "(") {
      f.kind = RawFormula::Kind::Rel;
      f.rel = next().text;
      expect("(");
      do f.args.push_back(term());
      while (accept(","));
      expect(")");
      return f;
    }
    f.kind = RawFormula::Kind::Rel;
    f.args.push_back(term());
    static const std::set<std::string, std::less<>> cmp = {"=", "!=", "<", "<=", ">", ">="};
    if (peek().kind != Tok::Punct || !cmp.count(peek().text))
      fail(peek(), "expected a comparison operator, got '" + describe(peek()) + "'");
    f.rel = next().text;
    f.args.push_back(term());
    return f;
  }

  // A bare variable name or a formula.
  void target(RawFormula& f) {
    const bool bare = peek().kind == Tok::Ident && !is_word("not") && !starts_operator() &&
                      !(peek(1).kind == Tok::Punct && peek(1).text == "(") && !is_word("true") &&
                      !is_word("false") && !(peek(1).kind == Tok::Punct && is_comparison(peek(1).text));
    if (bare)
      f.bare = name();
    else
      f.subs.push_back(unary());
  }

  static bool is_comparison(const std::string& s) {
    return s == "=" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=";
  }

  Name name() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected an identifier, got '" + describe(peek()) + "'");
    const Token& t = next();
    return {t.text, span(t)};
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(std::string_view punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
  bool is_word(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }
  bool accept(std::string_view punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail(peek(), "expected '" + std::string(punct) + "', got '" + describe(peek()) + "'");
  }
  void expect_word(std::string_view word) {
    if (!is_word(word)) fail(peek(), "expected '" + std::string(word) + "', got '" + describe(peek()) + "'");
    next();
  }

  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  SourceSpan span(const Token& t) const {
    const std::size_t width = std::max<std::size_t>(t.text.size() + (t.kind == Tok::String ? 2 : 0), 1);
    return {file_, t.line, t.column, t.column + width};
  }

  [[noreturn]] void fail(const Token& t, std::string message) { fail_at(span(t), std::move(message)); }
  [[noreturn]] void fail_at(SourceSpan s, std::string message) {
    diags_.push_back({std::move(s), std::move(message)});
    throw Abort{};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string file_;
  std::vector<Diagnostic>& diags_;
};

// ---------------------------------------------------------------- resolution

class Resolver {
 public:
  explicit Resolver(std::vector<Diagnostic>& diags) : diags_(diags) {}

  Problem build(const RawProblem& raw) {
    Problem p;
    p.name = raw.name;
    for (const Name& a : raw.agents) {
      if (p.vocab.find_agent(a.text))
        error(a.span, "duplicate agent '" + a.text + "'");
      else
        p.vocab.add_agent(a.text);
    }
    if (raw.agents.empty()) error(raw.head, "problem declares no agents");
    for (const auto& a : p.vocab.agents()) symbols_.insert(a);

    // Domains first so that anchors and values may refer to later declarations.
    std::vector<std::optional<Domain>> domains;
    for (const RawVar& v : raw.vars) {
      domains.push_back(domain(v.domain));
      if (names_.count(v.name.text)) error(v.name.span, "duplicate variable '" + v.name.text + "'");
      names_.emplace(v.name.text, VarId{static_cast<std::uint32_t>(names_.size())});
    }
    for (const RawOperator& o : raw.operators) {
      param_domains_.emplace_back();
      for (const RawParam& param : o.params) param_domains_.back().push_back(domain(param.domain));
    }
    vocab_ = &p.vocab;

    for (std::size_t i = 0; i < raw.vars.size(); ++i) {
      const RawVar& v = raw.vars[i];
      VarDecl decl;
      decl.name = v.name.text;
      decl.kind = v.constant ? VarKind::Constant : VarKind::Fluent;
      decl.domain = domains[i].value_or(Domain::boolean());
      decl.anchor = anchor(v.anchor, v.name);
      if (v.initial) {
        decl.initial = decl.domain.coerce(value(*v.initial));
        if (domains[i] && !decl.domain.contains(decl.initial))
          error(v.initial->span, "initial value " + to_string(decl.initial) + " of " + decl.name + " is outside " +
                                     to_string(decl.domain));
      } else {
        decl.initial = decl.domain.at(0);
      }
      if (!names_.count(decl.name) || names_.at(decl.name).index != p.vocab.num_vars()) continue;
      p.vocab.add_var(std::move(decl));
    }
    if (p.vocab.num_vars() != raw.vars.size()) return p;  // duplicates already reported

    for (const auto& [target, raw_value] : raw.init) {
      auto id = p.vocab.find_var(target.text);
      if (!id) {
        error(target.span, "undeclared variable '" + target.text + "'");
        continue;
      }
      if (p.vocab.var(*id).kind == VarKind::Constant) error(target.span, "cannot re-initialise constant " + target.text);
      overrides_.emplace_back(*id, raw_value);
    }

    if (raw.perspective) {
      p.perspective.kind = raw.perspective->first.text;
      for (const auto& [key, raw_value] : raw.perspective->second) p.perspective.params[key.text] = value(raw_value);
    }

    for (std::size_t i = 0; i < raw.operators.size(); ++i) p.operators.push_back(op(raw.operators[i], param_domains_[i]));

    if (raw.goals.empty()) {
      error(raw.head, "problem has no goal");
    } else {
      std::vector<Formula> parts;
      for (const RawFormula& g : raw.goals) parts.push_back(formula(g, {}));
      p.goal = conj(parts);
    }
    for (const RawFormula& m : raw.maintain) p.maintain.push_back(formula(m, {}));

    if (!diags_.empty()) return p;
    apply_overrides(p);
    if (!diags_.empty()) return p;
    try {
      check_problem(p, RelationRegistry::builtins());
    } catch (const ProblemError& e) {
      error(raw.head, e.what());
    }
    try {
      make_perspective(p.perspective, p.vocab);
    } catch (const std::exception& e) {
      error(raw.perspective ? raw.perspective->first.span : raw.head, e.what());
    }
    return p;
  }

  void bind(const Problem& p) {
    vocab_ = &p.vocab;
    for (std::size_t i = 0; i < p.vocab.num_vars(); ++i) {
      const VarDecl& d = p.vocab.vars()[i];
      names_.emplace(d.name, VarId{static_cast<std::uint32_t>(i)});
      add_symbols(d.domain);
    }
    for (const Operator& o : p.operators)
      for (const Param& param : o.params) add_symbols(param.domain);
    for (const auto& a : p.vocab.agents()) symbols_.insert(a);
  }

  Formula formula(const RawFormula& f, const std::vector<RawParam>& params) {
    switch (f.kind) {
      case RawFormula::Kind::Rel: {
        std::vector<Term> args;
        for (const RawTerm& t : f.args) args.push_back(term(t, params));
        coerce_literals(f.rel, args, params);
        try {
          RelationRegistry::builtins().check(f.rel, args.size());
        } catch (const RelationError& e) {
          error(f.span, e.what());
        }
        return rel(f.rel, std::move(args));
      }
      case RawFormula::Kind::Not:
        return negate(formula(f.subs[0], params));
      case RawFormula::Kind::And:
        return conj(formula(f.subs[0], params), formula(f.subs[1], params));
      case RawFormula::Kind::Sees: {
        AgentId a = agent(f.agents[0]);
        if (f.bare) return sees(a, var(*f.bare));
        return sees(a, formula(f.subs[0], params));
      }
      case RawFormula::Kind::Knows:
        return knows(agent(f.agents[0]), formula(f.subs[0], params));
      case RawFormula::Kind::Group: {
        std::vector<AgentId> group;
        for (const Name& n : f.agents) group.push_back(agent(n));
        if (f.knowledge) {
          if (f.bare) {
            error(f.bare->span, "knowledge target must be a formula, not the bare name '" + f.bare->text + "'");
            return group_knows(f.mode, group, eq(Value::integer(0), Value::integer(0)));
          }
          return group_knows(f.mode, group, formula(f.subs[0], params));
        }
        if (f.bare) return group_sees(f.mode, group, var(*f.bare));
        return group_sees(f.mode, group, FormulaRef(formula(f.subs[0], params)));
      }
    }
    return {};
  }

 private:
  std::optional<Domain> domain(const RawDomain& d) {
    try {
      switch (d.kind) {
        case RawDomain::Kind::Range:
          return Domain::range(d.lo, d.hi);
        case RawDomain::Kind::Bool:
          return Domain::boolean();
        case RawDomain::Kind::Set: {
          std::vector<Value> values;
          for (const RawValue& v : d.values) {
            values.push_back(v.ident ? Value::symbol(v.ident->text) : v.literal);
            if (v.ident) symbols_.insert(v.ident->text);
          }
          return Domain::set(std::move(values));
        }
      }
    } catch (const std::invalid_argument& e) {
      error(d.span, e.what());
    }
    return std::nullopt;
  }

  void add_symbols(const Domain& d) {
    for (const Value& v : d.members())
      if (v.is_symbol()) symbols_.insert(std::string(v.as_symbol().str()));
  }

  Anchor anchor(const RawAnchor& a, const Name& owner) {
    auto coordinate = [&](const RawTerm& t) -> Term {
      if (!t.ident) {
        if (!t.literal.is_int()) error(t.span, "anchor coordinates of " + owner.text + " must be integers");
        return t.literal;
      }
      return var(*t.ident);
    };
    switch (a.kind) {
      case RawAnchor::Kind::None:
        return NoAnchor{};
      case RawAnchor::Kind::Pos:
        return PosAnchor{coordinate(a.terms[0]), coordinate(a.terms[1])};
      case RawAnchor::Kind::Room:
        return RoomAnchor{coordinate(a.terms[0])};
      case RawAnchor::Kind::Page:
        return PageAnchor{};
    }
    return NoAnchor{};
  }

  Value value(const RawValue& v) {
    if (!v.ident) return v.literal;
    if (!symbols_.count(v.ident->text)) error(v.ident->span, "undeclared identifier '" + v.ident->text + "'");
    return Value::symbol(v.ident->text);
  }

  Operator op(const RawOperator& o, const std::vector<std::optional<Domain>>& domains) {
    Operator out;
    out.name = o.name.text;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < o.params.size(); ++i) {
      const RawParam& param = o.params[i];
      if (!seen.insert(param.name.text).second) error(param.name.span, "duplicate parameter '" + param.name.text + "'");
      out.params.push_back({param.name.text, domains[i].value_or(Domain::range(0, 0))});
    }
    out.pre = formula(o.pre, o.params);
    for (const RawEffect& e : o.effects) {
      Effect eff;
      eff.target = var(e.target);
      if (e.cond) eff.cond = formula(*e.cond, o.params);
      for (const auto& [negative, t] : e.terms) eff.value.terms.push_back({negative, term(t, o.params)});
      if (vocab_ && eff.target.index < vocab_->num_vars()) {
        const VarDecl& target = vocab_->var(eff.target);
        if (target.kind == VarKind::Constant) error(e.target.span, "cannot assign constant " + target.name);
        if (eff.value.terms.size() == 1)
          if (auto* lit = std::get_if<Value>(&eff.value.terms[0].term)) *lit = target.domain.coerce(*lit);
      }
      out.effects.push_back(std::move(eff));
    }
    return out;
  }

  Term term(const RawTerm& t, const std::vector<RawParam>& params) {
    if (!t.ident) return t.literal;
    const std::string& n = t.ident->text;
    if (auto it = names_.find(n); it != names_.end()) return it->second;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name.text == n) return ParamRef{static_cast<std::uint32_t>(i)};
    if (symbols_.count(n)) return Value::symbol(n);
    error(t.ident->span, "undeclared identifier '" + n + "'");
    return Value::integer(0);
  }

  // An integer 0/1 compared against a bool-valued variable means false/true.
  void coerce_literals(const std::string& name, std::vector<Term>& args, const std::vector<RawParam>&) {
    if (args.size() != 2 || !vocab_ || (name != "=" && name != "!=")) return;
    for (int side = 0; side < 2; ++side) {
      const auto* v = std::get_if<VarId>(&args[side]);
      auto* lit = std::get_if<Value>(&args[1 - side]);
      if (v && lit && v->index < vocab_->num_vars()) *lit = vocab_->var(*v).domain.coerce(*lit);
    }
  }

  VarId var(const Name& n) {
    if (auto it = names_.find(n.text); it != names_.end()) return it->second;
    error(n.span, "undeclared variable '" + n.text + "'");
    return VarId{0};
  }

  AgentId agent(const Name& n) {
    if (vocab_)
      if (auto a = vocab_->find_agent(n.text)) return *a;
    error(n.span, "undeclared agent '" + n.text + "'");
    return AgentId{0};
  }

  void apply_overrides(Problem& p) {
    if (overrides_.empty()) return;
    Vocabulary rebuilt;
    for (const auto& a : p.vocab.agents()) rebuilt.add_agent(a);
    std::vector<VarDecl> decls = p.vocab.vars();
    for (const auto& [id, raw_value] : overrides_) {
      VarDecl& d = decls[id.index];
      d.initial = d.domain.coerce(value(raw_value));
      if (!d.domain.contains(d.initial)) error(raw_value.span, "initial value outside the domain of " + d.name);
    }
    for (auto& d : decls) rebuilt.add_var(std::move(d));
    p.vocab = std::move(rebuilt);
  }

  void error(const SourceSpan& s, std::string message) { diags_.push_back({s, std::move(message)}); }

  std::vector<Diagnostic>& diags_;
  const Vocabulary* vocab_ = nullptr;
  std::map<std::string, VarId, std::less<>> names_;
  std::set<std::string, std::less<>> symbols_;
  std::vector<std::pair<VarId, RawValue>> overrides_;
  std::vector<std::vector<std::optional<Domain>>> param_domains_;
};

}  // namespace

Problem parse_problem(std::string_view text, std::string_view file) {
  std::vector<Diagnostic> diags;
  auto tokens = Lexer(text, std::string(file), diags).run();
  if (!diags.empty()) throw ParseError(std::move(diags));
  RawProblem raw;
  try {
    raw = Parser(std::move(tokens), std::string(file), diags).problem();
  } catch (const Abort&) {
    throw ParseError(std::move(diags));
  }
  Problem p = Resolver(diags).build(raw);
  if (!diags.empty()) throw ParseError(std::move(diags));
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError({{{path.string(), 0, 0, 0}, "cannot open file"}});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str(), path.string());
}

Formula parse_formula(std::string_view text, const Problem& problem, std::string_view file) {
  std::vector<Diagnostic> diags;
  auto tokens = Lexer(text, std::string(file), diags).run();
  if (!diags.empty()) throw ParseError(std::move(diags));
  RawFormula raw;
  try {
    raw = Parser(std::move(tokens), std::string(file), diags).lone_formula();
  } catch (const Abort&) {
    throw ParseError(std::move(diags));
  }
  Resolver resolver(diags);
  resolver.bind(problem);
  Formula f = resolver.formula(raw, {});
  if (!diags.empty()) throw ParseError(std::move(diags));
  return f;
}

// ---------------------------------------------------------------- printer

namespace {

std::string print_term(const Term& t, const Vocabulary& vocab, std::span<const std::string> params) {
  return to_string(t, vocab, params);
}

std::string print_anchor(const Anchor& a, const Vocabulary& vocab) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using A = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<A, PosAnchor>)
          return " @pos(" + print_term(x.x, vocab, {}) + ", " + print_term(x.y, vocab, {}) + ")";
        else if constexpr (std::is_same_v<A, RoomAnchor>)
          return " @room(" + print_term(x.room, vocab, {}) + ")";
        else if constexpr (std::is_same_v<A, PageAnchor>)
          return " @page";
        else
          return "";
      },
      a);
}

std::string print_expr(const Expr& e, const Vocabulary& vocab, std::span<const std::string> params) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const SignedTerm& t = e.terms[i];
    if (i) out += t.negative ? " - " : " + ";
    else if (t.negative) out += "-";
    out += print_term(t.term, vocab, params);
  }
  return out;
}

}  // namespace

std::string print_problem(const Problem& p) {
  std::ostringstream out;
  out << "problem \"" << p.name << "\"\n\n";
  out << "agents";
  for (const auto& a : p.vocab.agents()) out << ' ' << a;
  out << "\n";
  out << "perspective " << p.perspective.kind << " {";
  for (const auto& [key, value] : p.perspective.params) out << ' ' << key << ": " << to_string(value);
  out << " }\n\n";
  for (const VarDecl& d : p.vocab.vars()) {
    out << (d.kind == VarKind::Constant ? "const " : "var ") << d.name << " : " << to_string(d.domain)
        << print_anchor(d.anchor, p.vocab) << " = " << to_string(d.initial) << "\n";
  }
  for (const Operator& o : p.operators) {
    std::vector<std::string> names;
    out << "\noperator " << o.name << "(";
    for (std::size_t i = 0; i < o.params.size(); ++i) {
      if (i) out << ", ";
      out << o.params[i].name << ": " << to_string(o.params[i].domain);
      names.push_back(o.params[i].name);
    }
    out << ") {\n  pre: " << to_string(o.pre, p.vocab, names) << "\n  eff:\n";
    for (const Effect& e : o.effects) {
      out << "    ";
      if (e.cond) out << "when " << to_string(*e.cond, p.vocab, names) << " then ";
      out << p.vocab.var(e.target).name << " := " << print_expr(e.value, p.vocab, names) << "\n";
    }
    out << "}\n";
  }
  out << "\ngoal: " << to_string(p.goal, p.vocab) << "\n";
  for (const Formula& m : p.maintain) out << "maintain: " << to_string(m, p.vocab) << "\n";
  return out.str();
}

}  // namespace epiplan
