#pragma once

#include "epiplan/epistemic.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace epiplan {

struct SignedTerm {
  bool negative = false;
  Term term;
  friend bool operator==(const SignedTerm&, const SignedTerm&) = default;
};

// Signed sum of terms. A single positive term yields its value unchanged;
// anything else is integer arithmetic.
struct Expr {
  std::vector<SignedTerm> terms;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Effect {
  std::optional<Formula> cond;
  VarId target;
  Expr value;
  friend bool operator==(const Effect&, const Effect&) = default;
};

struct Param {
  std::string name;
  Domain domain;
  friend bool operator==(const Param&, const Param&) = default;
};

struct Operator {
  std::string name;
  std::vector<Param> params;
  Formula pre;
  std::vector<Effect> effects;
  friend bool operator==(const Operator&, const Operator&) = default;
};

struct Problem {
  std::string name;
  Vocabulary vocab;
  PerspectiveSpec perspective;
  std::vector<Operator> operators;
  Formula goal;
  std::vector<Formula> maintain;

  // Initial values come from the declarations.
  State initial() const;
  friend bool operator==(const Problem&, const Problem&) = default;
};

class ProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws ProblemError on constants assigned by effects, out-of-domain initial
// values, ill-formed formulas, or non-finite parameter domains.
void check_problem(const Problem& p, const RelationRegistry& rels);

// A grounded operator instance.
struct Action {
  std::size_t op = 0;
  std::vector<Value> args;
  std::string label;  // name(arg,...)
  Formula pre;
  std::optional<bool> static_pre;  // set when the precondition has no variables or epistemic nodes
  std::vector<Effect> effects;
  bool needs_local = false;  // precondition or some condition must be evaluated per state
};

std::vector<Action> ground(const Operator& op, std::size_t index, const EvalContext& ctx, std::size_t universe);

Value evaluate(const Expr& e, const State& s, std::span<const Value> params = {});

struct Plan {
  std::vector<std::size_t> steps;  // indices into Task::actions()
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Verdict {
  enum class Kind : std::uint8_t { Valid, Inapplicable, MaintainViolated, GoalUnmet };
  Kind kind = Kind::Valid;
  std::size_t where = 0;  // step index or state index

  bool valid() const { return kind == Kind::Valid; }
  std::string describe() const;
};

// A checked problem with its evaluation context and grounded actions.
class Task {
 public:
  explicit Task(Problem problem, RelationRegistry relations = RelationRegistry::builtins());

  const Problem& problem() const { return problem_; }
  const Vocabulary& vocab() const { return problem_.vocab; }
  const EvalContext& ctx() const { return *ctx_; }
  EvalContext& ctx() { return *ctx_; }
  const std::vector<Action>& actions() const { return actions_; }
  const std::vector<VarId>& fluents() const { return fluents_; }
  const State& initial() const { return initial_; }

  bool applicable(const Action& a, const State& s) const;
  // Writes the successor into `out` and returns true when `a` is applicable.
  // `local` must be s.local() when a.needs_local is set.
  bool successor(const Action& a, const State& s, const LocalState* local, State& out) const;
  // Throws std::logic_error when `a` is inapplicable.
  State apply(const Action& a, const State& s) const;

  bool goal(const State& s) const;
  bool maintained(const State& s) const;

  Verdict validate(const Plan& plan) const;
  std::optional<std::size_t> find_action(std::string_view label) const;
  // One `name(arg,...)` per line; blank lines and `#` comments are skipped.
  Plan parse_plan(std::string_view text) const;
  std::string format_plan(const Plan& plan) const;

 private:
  Problem problem_;
  std::unique_ptr<EvalContext> ctx_;
  std::vector<Action> actions_;
  std::vector<VarId> fluents_;
  State initial_;
  std::unordered_map<std::string, std::size_t> by_label_;
};

}  // namespace epiplan
