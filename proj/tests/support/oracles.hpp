// Independent reference implementations shared by the unit and acceptance tests.
#pragma once

#include "epiplan/bench.hpp"
#include "epiplan/dsl.hpp"
#include "epiplan/epistemic.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace epiplan::oracle {

// Uniform total state; each entry is then dropped with probability `drop`.
inline LocalState random_local(const Vocabulary& vocab, std::mt19937& rng, double drop) {
  LocalState l(vocab.num_vars());
  std::bernoulli_distribution gone(drop);
  for (std::size_t v = 0; v < vocab.num_vars(); ++v) {
    const Domain& d = vocab.vars()[v].domain;
    std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
    const Value value = d.at(pick(rng));
    if (!gone(rng)) l.set(VarId{static_cast<std::uint32_t>(v)}, value);
  }
  return l;
}

inline State random_state(const Vocabulary& vocab, std::mt19937& rng) {
  std::vector<Value> values;
  for (const VarDecl& d : vocab.vars()) {
    std::uniform_int_distribution<std::size_t> pick(0, d.domain.size() - 1);
    values.push_back(d.domain.at(pick(rng)));
  }
  return State(std::move(values));
}

// Random formulas over value atoms and every modal operator.
class FormulaGen {
 public:
  FormulaGen(const Vocabulary& vocab, std::mt19937& rng) : vocab_(vocab), rng_(rng) {}

  Formula atom() {
    const VarId v = var();
    const Domain& d = vocab_.var(v).domain;
    std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
    return eq(v, d.at(pick(rng_)));
  }

  Formula operator()(int depth) {
    std::uniform_int_distribution<int> choice(0, depth > 0 ? 8 : 2);
    switch (choice(rng_)) {
      case 0:
      case 1:
        return atom();
      case 2:
        return depth > 0 ? negate((*this)(depth)) : atom();
      case 3:
        return conj((*this)(depth), (*this)(depth));
      case 4:
        return sees(agent(), var());
      case 5:
        return knows(agent(), (*this)(depth - 1));
      case 6:
        return sees(agent(), (*this)(depth - 1));
      case 7:
        return group_knows(mode(), group(), (*this)(depth - 1));
      default:
        return group_sees(mode(), group(), GroupTarget{FormulaRef((*this)(depth - 1))});
    }
  }

  AgentId agent() {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(vocab_.num_agents() - 1));
    return AgentId{pick(rng_)};
  }
  std::vector<AgentId> group() {
    std::vector<AgentId> g = {agent(), agent()};
    if (std::bernoulli_distribution(0.3)(rng_)) g.push_back(agent());
    return g;
  }

 private:
  VarId var() {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(vocab_.num_vars() - 1));
    return VarId{pick(rng_)};
  }
  GroupMode mode() {
    std::uniform_int_distribution<int> pick(0, 2);
    return static_cast<GroupMode>(pick(rng_));
  }

  const Vocabulary& vocab_;
  std::mt19937& rng_;
};

inline Formula implies(Formula a, Formula b) { return negate(conj(std::move(a), negate(std::move(b)))); }

struct Named {
  std::string label;
  Problem problem;
};

// One problem per built-in perspective kind.
inline std::vector<Named> builtin_cases() {
  std::vector<Named> out;
  out.push_back({"full", parse_problem(R"(problem "f"
agents a b c
perspective full { }
var x : 0..2 = 0
var y : bool = false
const z : {p, q} = p
operator noop() { pre: 0 = 0 eff: x := x }
goal: x = 0
)")});
  out.push_back({"euclidean2d", build_bbl(1)});
  out.push_back({"latched-rooms", gen_corridor(3, 4, 1, 2)});
  out.push_back({"social", build_sn(12)});
  return out;
}

// Outcome of one S5 check; `failed` names the first violated property.
struct S5Check {
  bool nested = false;
  std::string failed;
};

inline S5Check check_s5(const EvalContext& ctx, FormulaGen& gen, const State& s) {
  const Formula phi = gen(3), psi = gen(3);
  const AgentId i = gen.agent();
  const auto holds = [&](const Formula& f) { return eval(ctx, f, s); };
  S5Check out{modal_depth(phi) >= 2, {}};
  if (!holds(implies(knows(i, phi), phi))) out.failed = "T";
  else if (!holds(implies(conj(knows(i, implies(phi, psi)), knows(i, phi)), knows(i, psi)))) out.failed = "K";
  else if (!holds(implies(knows(i, phi), knows(i, knows(i, phi))))) out.failed = "4";
  else if (!holds(implies(negate(knows(i, phi)), knows(i, negate(knows(i, phi)))))) out.failed = "5";
  else if (holds(sees(i, phi)) != holds(sees(i, negate(phi)))) out.failed = "negation";
  if (!out.failed.empty()) return out;

  const auto g = gen.group();
  const bool ck = holds(group_knows(GroupMode::Common, g, phi));
  const bool ek = holds(group_knows(GroupMode::Everyone, g, phi));
  const bool dk = holds(group_knows(GroupMode::Distributed, g, phi));
  if (ck && !ek) out.failed = "CK=>EK";
  for (AgentId member : g) {
    const bool k = holds(knows(member, phi));
    if (out.failed.empty() && ek && !k) out.failed = "EK=>K";
    if (out.failed.empty() && k && !dk) out.failed = "K=>DK";
  }
  return out;
}

// One round applied exactly `rounds` times: keep what every member sees.
inline LocalState iterate_common(const Perspective& f, std::span<const AgentId> g, LocalState l, std::size_t rounds) {
  for (std::size_t r = 0; r < rounds; ++r) {
    LocalState next(l.universe());
    for (std::size_t v = 0; v < l.universe(); ++v) {
      const VarId id{static_cast<std::uint32_t>(v)};
      bool everyone = l.contains(id);
      for (AgentId a : g) everyone = everyone && f.apply(a, l).contains(id);
      if (everyone) next.set(id, *l.get(id));
    }
    l = std::move(next);
  }
  return l;
}

inline std::vector<AgentId> distinct(std::vector<AgentId> g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// Shortest plan length by enumerating every action sequence up to `max_len`, no duplicate detection.
inline std::optional<std::size_t> shortest_by_enumeration(const Task& t, std::size_t max_len) {
  std::vector<State> layer = {t.initial()};
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<State> next;
    for (const State& s : layer) {
      if (!t.maintained(s)) continue;
      if (t.goal(s)) return len;
      if (len == max_len) continue;
      for (const Action& a : t.actions())
        if (t.applicable(a, s)) next.push_back(t.apply(a, s));
    }
    layer = std::move(next);
  }
  return std::nullopt;
}

}  // namespace epiplan::oracle
