#pragma once

#include "epiplan/core.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace epiplan {

struct Formula;

// Immutable shared handle to a subformula; compares structurally.
class FormulaRef {
 public:
  FormulaRef(Formula f);  // NOLINT(google-explicit-constructor)
  const Formula& operator*() const { return *ptr_; }
  const Formula* operator->() const { return ptr_.get(); }
  friend bool operator==(const FormulaRef& a, const FormulaRef& b);

 private:
  std::shared_ptr<const Formula> ptr_;
};

enum class GroupMode : std::uint8_t { Everyone, Distributed, Common };

struct Rel {
  std::string name;
  std::vector<Term> args;
  friend bool operator==(const Rel&, const Rel&) = default;
};
struct Not {
  FormulaRef sub;
  friend bool operator==(const Not&, const Not&) = default;
};
struct And {
  FormulaRef lhs;
  FormulaRef rhs;
  friend bool operator==(const And&, const And&) = default;
};
struct SeesVar {
  AgentId agent;
  VarId var;
  friend bool operator==(const SeesVar&, const SeesVar&) = default;
};
struct Sees {
  AgentId agent;
  FormulaRef sub;
  friend bool operator==(const Sees&, const Sees&) = default;
};
struct Knows {
  AgentId agent;
  FormulaRef sub;
  friend bool operator==(const Knows&, const Knows&) = default;
};
using GroupTarget = std::variant<VarId, FormulaRef>;
struct GroupSees {
  GroupMode mode;
  std::vector<AgentId> agents;
  GroupTarget target;
  friend bool operator==(const GroupSees&, const GroupSees&) = default;
};
struct GroupKnows {
  GroupMode mode;
  std::vector<AgentId> agents;
  FormulaRef sub;
  friend bool operator==(const GroupKnows&, const GroupKnows&) = default;
};

struct Formula {
  std::variant<Rel, Not, And, SeesVar, Sees, Knows, GroupSees, GroupKnows> node;
  friend bool operator==(const Formula&, const Formula&) = default;
};

// Builders.
Formula rel(std::string name, std::vector<Term> args);
Formula eq(Term a, Term b);
Formula negate(Formula f);
Formula conj(Formula a, Formula b);
Formula conj(std::span<const Formula> parts);  // requires a nonempty span
Formula sees(AgentId i, VarId v);
Formula sees(AgentId i, Formula f);
Formula knows(AgentId i, Formula f);
Formula group_sees(GroupMode m, std::vector<AgentId> g, GroupTarget target);
Formula group_knows(GroupMode m, std::vector<AgentId> g, Formula f);

bool is_epistemic(const Formula& f);
bool has_epistemic(const Formula& f);
VarSet vars_of(const Formula& f, std::size_t universe);
int modal_depth(const Formula& f);
// Top-level conjuncts, flattened left to right.
std::vector<Formula> conjuncts(const Formula& f);
bool has_params(const Formula& f);
Formula substitute(const Formula& f, std::span<const Value> params);
Term substitute(const Term& t, std::span<const Value> params);

struct Relation {
  std::optional<std::size_t> arity;  // nullopt means variadic
  std::function<bool(std::span<const Value>)> holds;
};

class RelationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RelationRegistry {
 public:
  void add(std::string name, Relation r);
  const Relation* find(std::string_view name) const;
  // Throws RelationError for unknown names, arity mismatches, or ill-typed operands.
  bool holds(std::string_view name, std::span<const Value> args) const;
  void check(std::string_view name, std::size_t arity) const;

  // =, !=, <, <=, >, >=, far_away
  static RelationRegistry builtins();

 private:
  std::map<std::string, Relation, std::less<>> relations_;
};

// Throws std::invalid_argument if f mentions undeclared agents/variables,
// unknown relations, or empty groups.
void validate(const Formula& f, const Vocabulary& vocab, const RelationRegistry& rels,
              std::size_t num_params = 0);

// DSL surface syntax. Parameter references print as the supplied names.
std::string to_string(const Term& t, const Vocabulary& vocab, std::span<const std::string> params = {});
std::string to_string(const Formula& f, const Vocabulary& vocab, std::span<const std::string> params = {});

}  // namespace epiplan
