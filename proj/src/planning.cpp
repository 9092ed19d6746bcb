#include "epiplan/planning.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace epiplan {

State Problem::initial() const {
  std::vector<Value> values;
  values.reserve(vocab.num_vars());
  for (const VarDecl& d : vocab.vars()) values.push_back(d.initial);
  return State(std::move(values));
}

namespace {

void check_term(const Term& t, std::size_t num_vars, std::size_t num_params, const std::string& where) {
  if (const auto* v = std::get_if<VarId>(&t); v && v->index >= num_vars)
    throw ProblemError(where + ": undeclared variable");
  if (const auto* p = std::get_if<ParamRef>(&t); p && p->index >= num_params)
    throw ProblemError(where + ": parameter reference out of range");
}

void check_formula(const Formula& f, const Problem& p, const RelationRegistry& rels, std::size_t num_params,
                   const std::string& where) {
  try {
    validate(f, p.vocab, rels, num_params);
  } catch (const std::invalid_argument& e) {
    throw ProblemError(where + ": " + e.what());
  }
}

}  // namespace

void check_problem(const Problem& p, const RelationRegistry& rels) {
  const std::size_t n = p.vocab.num_vars();
  if (p.vocab.num_agents() == 0) throw ProblemError("problem declares no agents");
  for (const VarDecl& d : p.vocab.vars()) {
    if (!d.domain.contains(d.initial))
      throw ProblemError("initial value " + to_string(d.initial) + " of " + d.name + " is outside " +
                         to_string(d.domain));
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, PosAnchor>) {
            check_term(a.x, n, 0, "anchor of " + d.name);
            check_term(a.y, n, 0, "anchor of " + d.name);
          } else if constexpr (std::is_same_v<A, RoomAnchor>) {
            check_term(a.room, n, 0, "anchor of " + d.name);
          }
        },
        d.anchor);
  }
  for (const Operator& op : p.operators) {
    const std::string where = "operator " + op.name;
    for (const Param& param : op.params)
      if (param.domain.size() == 0) throw ProblemError(where + ": empty parameter domain");
    check_formula(op.pre, p, rels, op.params.size(), where + " precondition");
    for (const Effect& e : op.effects) {
      if (e.target.index >= n) throw ProblemError(where + ": effect on undeclared variable");
      const VarDecl& target = p.vocab.var(e.target);
      if (target.kind == VarKind::Constant) throw ProblemError(where + ": assigns constant " + target.name);
      if (e.value.terms.empty()) throw ProblemError(where + ": empty value expression");
      for (const SignedTerm& t : e.value.terms) check_term(t.term, n, op.params.size(), where);
      if (e.cond) check_formula(*e.cond, p, rels, op.params.size(), where + " condition");
    }
  }
  check_formula(p.goal, p, rels, 0, "goal");
  for (const Formula& m : p.maintain) check_formula(m, p, rels, 0, "maintain");
}

Value evaluate(const Expr& e, const State& s, std::span<const Value> params) {
  auto resolve = [&](const Term& t) -> Value {
    if (const auto* v = std::get_if<VarId>(&t)) return s[*v];
    if (const auto* lit = std::get_if<Value>(&t)) return *lit;
    return params[std::get<ParamRef>(t).index];
  };
  if (e.terms.size() == 1 && !e.terms[0].negative) return resolve(e.terms[0].term);
  std::int64_t sum = 0;
  for (const SignedTerm& t : e.terms) {
    const std::int64_t v = resolve(t.term).as_int();
    sum += t.negative ? -v : v;
  }
  return Value::integer(sum);
}

namespace {

Expr bind_params(const Expr& e, std::span<const Value> args) {
  Expr out;
  for (const SignedTerm& t : e.terms) out.terms.push_back({t.negative, substitute(t.term, args)});
  // Fold a fully literal expression so applicability checks skip the arithmetic.
  const bool literal = std::all_of(out.terms.begin(), out.terms.end(),
                                   [](const SignedTerm& t) { return std::holds_alternative<Value>(t.term); });
  if (literal && out.terms.size() > 1) return Expr{{{false, evaluate(out, State{}, {})}}};
  return out;
}

std::string make_label(const std::string& name, const std::vector<Value>& args) {
  if (args.empty()) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += to_string(args[i]);
  }
  return out + ")";
}

}  // namespace

std::vector<Action> ground(const Operator& op, std::size_t index, const EvalContext& ctx, std::size_t universe) {
  std::vector<Action> out;
  std::vector<std::size_t> digits(op.params.size(), 0);
  for (;;) {
    Action a;
    a.op = index;
    for (std::size_t i = 0; i < op.params.size(); ++i) a.args.push_back(op.params[i].domain.at(digits[i]));
    a.label = make_label(op.name, a.args);
    a.pre = substitute(op.pre, a.args);
    if (!has_epistemic(a.pre) && vars_of(a.pre, universe).none()) {
      a.static_pre = eval(ctx, a.pre, LocalState(universe));
    }
    for (const Effect& e : op.effects) {
      Effect bound{std::nullopt, e.target, bind_params(e.value, a.args)};
      if (e.cond) bound.cond = substitute(*e.cond, a.args);
      a.needs_local = a.needs_local || bound.cond.has_value();
      a.effects.push_back(std::move(bound));
    }
    a.needs_local = a.needs_local || !a.static_pre;
    out.push_back(std::move(a));

    // Odometer: the last parameter varies fastest.
    std::size_t i = op.params.size();
    while (i > 0) {
      --i;
      if (++digits[i] < op.params[i].domain.size()) break;
      digits[i] = 0;
      if (i == 0) return out;
    }
    if (op.params.empty()) return out;
  }
}

std::string Verdict::describe() const {
  switch (kind) {
    case Kind::Valid:
      return "valid";
    case Kind::Inapplicable:
      return "step " + std::to_string(where) + " inapplicable";
    case Kind::MaintainViolated:
      return "maintain violated at state " + std::to_string(where);
    case Kind::GoalUnmet:
      return "goal unmet";
  }
  return {};
}

Task::Task(Problem problem, RelationRegistry relations) : problem_(std::move(problem)) {
  check_problem(problem_, relations);
  std::shared_ptr<const Perspective> perspective = make_perspective(problem_.perspective, problem_.vocab);
  ctx_ = std::make_unique<EvalContext>(std::move(perspective), std::move(relations));
  for (std::size_t i = 0; i < problem_.operators.size(); ++i)
    for (Action& a : ground(problem_.operators[i], i, *ctx_, problem_.vocab.num_vars())) {
      by_label_.emplace(a.label, actions_.size());
      actions_.push_back(std::move(a));
    }
  for (std::uint32_t v = 0; v < problem_.vocab.num_vars(); ++v)
    if (problem_.vocab.var(VarId{v}).kind == VarKind::Fluent) fluents_.push_back(VarId{v});
  initial_ = problem_.initial();
  ctx_->reset_calls();
}

bool Task::successor(const Action& a, const State& s, const LocalState* local, State& out) const {
  std::optional<LocalState> owned;
  auto view = [&]() -> const LocalState& {
    if (local) return *local;
    if (!owned) owned = s.local();
    return *owned;
  };
  if (a.static_pre ? !*a.static_pre : !eval(*ctx_, a.pre, view())) return false;
  out = s;
  for (const Effect& e : a.effects) {
    if (e.cond && !eval(*ctx_, *e.cond, view())) continue;
    const Domain& d = problem_.vocab.var(e.target).domain;
    Value v = d.coerce(evaluate(e.value, s));
    if (!d.contains(v)) return false;
    out.set(e.target, v);
  }
  return true;
}

bool Task::applicable(const Action& a, const State& s) const {
  State scratch;
  return successor(a, s, nullptr, scratch);
}

State Task::apply(const Action& a, const State& s) const {
  State out;
  if (!successor(a, s, nullptr, out)) throw std::logic_error("action " + a.label + " is not applicable");
  return out;
}

bool Task::goal(const State& s) const { return eval(*ctx_, problem_.goal, s); }

bool Task::maintained(const State& s) const {
  if (problem_.maintain.empty()) return true;
  const LocalState l = s.local();
  return std::all_of(problem_.maintain.begin(), problem_.maintain.end(),
                     [&](const Formula& m) { return eval(*ctx_, m, l); });
}

Verdict Task::validate(const Plan& plan) const {
  State s = initial_;
  if (!maintained(s)) return {Verdict::Kind::MaintainViolated, 0};
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    if (plan.steps[k] >= actions_.size()) return {Verdict::Kind::Inapplicable, k + 1};
    State next;
    if (!successor(actions_[plan.steps[k]], s, nullptr, next)) return {Verdict::Kind::Inapplicable, k + 1};
    s = std::move(next);
    if (!maintained(s)) return {Verdict::Kind::MaintainViolated, k + 1};
  }
  if (!goal(s)) return {Verdict::Kind::GoalUnmet, plan.steps.size()};
  return {};
}

namespace {

std::string strip_spaces(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  if (out.size() > 2 && out.ends_with("()")) out.resize(out.size() - 2);
  return out;
}

}  // namespace

std::optional<std::size_t> Task::find_action(std::string_view label) const {
  auto it = by_label_.find(strip_spaces(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

Plan Task::parse_plan(std::string_view text) const {
  Plan plan;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (strip_spaces(line).empty()) continue;
    auto index = find_action(line);
    if (!index) throw std::invalid_argument("line " + std::to_string(number) + ": unknown action '" + strip_spaces(line) + "'");
    plan.steps.push_back(*index);
  }
  return plan;
}

std::string Task::format_plan(const Plan& plan) const {
  std::string out;
  for (std::size_t step : plan.steps) out += actions_.at(step).label + "\n";
  return out;
}

}  // namespace epiplan
