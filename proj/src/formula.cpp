#include "epiplan/formula.hpp"

#include <algorithm>

namespace epiplan {

FormulaRef::FormulaRef(Formula f) : ptr_(std::make_shared<const Formula>(std::move(f))) {}

bool operator==(const FormulaRef& a, const FormulaRef& b) { return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_; }

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<AgentId> normalize(std::vector<AgentId> g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

Formula rel(std::string name, std::vector<Term> args) { return Formula{Rel{std::move(name), std::move(args)}}; }
Formula eq(Term a, Term b) { return rel("=", {std::move(a), std::move(b)}); }
Formula negate(Formula f) { return Formula{Not{std::move(f)}}; }
Formula conj(Formula a, Formula b) { return Formula{And{std::move(a), std::move(b)}}; }
Formula conj(std::span<const Formula> parts) {
  if (parts.empty()) throw std::invalid_argument("empty conjunction");
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = conj(std::move(out), parts[i]);
  return out;
}
Formula sees(AgentId i, VarId v) { return Formula{SeesVar{i, v}}; }
Formula sees(AgentId i, Formula f) { return Formula{Sees{i, std::move(f)}}; }
Formula knows(AgentId i, Formula f) { return Formula{Knows{i, std::move(f)}}; }
Formula group_sees(GroupMode m, std::vector<AgentId> g, GroupTarget target) {
  return Formula{GroupSees{m, normalize(std::move(g)), std::move(target)}};
}
Formula group_knows(GroupMode m, std::vector<AgentId> g, Formula f) {
  return Formula{GroupKnows{m, normalize(std::move(g)), std::move(f)}};
}

bool is_epistemic(const Formula& f) {
  return !std::holds_alternative<Rel>(f.node) && !std::holds_alternative<Not>(f.node) &&
         !std::holds_alternative<And>(f.node);
}

bool has_epistemic(const Formula& f) {
  return std::visit(overloaded{
                        [](const Rel&) { return false; },
                        [](const Not& n) { return has_epistemic(*n.sub); },
                        [](const And& a) { return has_epistemic(*a.lhs) || has_epistemic(*a.rhs); },
                        [](const auto&) { return true; },
                    },
                    f.node);
}

namespace {

void collect_term(const Term& t, VarSet& out) {
  if (const auto* v = std::get_if<VarId>(&t)) out.set(v->index);
}

void collect(const Formula& f, VarSet& out) {
  std::visit(overloaded{
                 [&](const Rel& r) {
                   for (const Term& t : r.args) collect_term(t, out);
                 },
                 [&](const Not& n) { collect(*n.sub, out); },
                 [&](const And& a) {
                   collect(*a.lhs, out);
                   collect(*a.rhs, out);
                 },
                 [&](const SeesVar& s) { out.set(s.var.index); },
                 [&](const Sees& s) { collect(*s.sub, out); },
                 [&](const Knows& k) { collect(*k.sub, out); },
                 [&](const GroupSees& g) {
                   if (const auto* v = std::get_if<VarId>(&g.target))
                     out.set(v->index);
                   else
                     collect(*std::get<FormulaRef>(g.target), out);
                 },
                 [&](const GroupKnows& g) { collect(*g.sub, out); },
             },
             f.node);
}

}  // namespace

VarSet vars_of(const Formula& f, std::size_t universe) {
  VarSet out(universe);
  collect(f, out);
  return out;
}

int modal_depth(const Formula& f) {
  return std::visit(overloaded{
                        [](const Rel&) { return 0; },
                        [](const Not& n) { return modal_depth(*n.sub); },
                        [](const And& a) { return std::max(modal_depth(*a.lhs), modal_depth(*a.rhs)); },
                        [](const SeesVar&) { return 1; },
                        [](const Sees& s) { return 1 + modal_depth(*s.sub); },
                        [](const Knows& k) { return 1 + modal_depth(*k.sub); },
                        [](const GroupSees& g) {
                          const auto* sub = std::get_if<FormulaRef>(&g.target);
                          return 1 + (sub ? modal_depth(**sub) : 0);
                        },
                        [](const GroupKnows& g) { return 1 + modal_depth(*g.sub); },
                    },
                    f.node);
}

std::vector<Formula> conjuncts(const Formula& f) {
  if (const auto* a = std::get_if<And>(&f.node)) {
    auto out = conjuncts(*a->lhs);
    for (auto& part : conjuncts(*a->rhs)) out.push_back(std::move(part));
    return out;
  }
  return {f};
}

bool has_params(const Formula& f) {
  auto term = [](const Term& t) { return std::holds_alternative<ParamRef>(t); };
  return std::visit(overloaded{
                        [&](const Rel& r) { return std::any_of(r.args.begin(), r.args.end(), term); },
                        [](const Not& n) { return has_params(*n.sub); },
                        [](const And& a) { return has_params(*a.lhs) || has_params(*a.rhs); },
                        [](const SeesVar&) { return false; },
                        [](const Sees& s) { return has_params(*s.sub); },
                        [](const Knows& k) { return has_params(*k.sub); },
                        [](const GroupSees& g) {
                          const auto* sub = std::get_if<FormulaRef>(&g.target);
                          return sub && has_params(**sub);
                        },
                        [](const GroupKnows& g) { return has_params(*g.sub); },
                    },
                    f.node);
}

Term substitute(const Term& t, std::span<const Value> params) {
  if (const auto* p = std::get_if<ParamRef>(&t)) return params[p->index];
  return t;
}

Formula substitute(const Formula& f, std::span<const Value> params) {
  if (!has_params(f)) return f;
  return std::visit(overloaded{
                        [&](const Rel& r) {
                          Rel out{r.name, {}};
                          for (const Term& t : r.args) out.args.push_back(substitute(t, params));
                          return Formula{std::move(out)};
                        },
                        [&](const Not& n) { return negate(substitute(*n.sub, params)); },
                        [&](const And& a) { return conj(substitute(*a.lhs, params), substitute(*a.rhs, params)); },
                        [&](const SeesVar& s) { return Formula{s}; },
                        [&](const Sees& s) { return sees(s.agent, substitute(*s.sub, params)); },
                        [&](const Knows& k) { return knows(k.agent, substitute(*k.sub, params)); },
                        [&](const GroupSees& g) {
                          GroupTarget target = g.target;
                          if (const auto* sub = std::get_if<FormulaRef>(&g.target))
                            target = FormulaRef(substitute(**sub, params));
                          return Formula{GroupSees{g.mode, g.agents, std::move(target)}};
                        },
                        [&](const GroupKnows& g) {
                          return Formula{GroupKnows{g.mode, g.agents, substitute(*g.sub, params)}};
                        },
                    },
                    f.node);
}

void RelationRegistry::add(std::string name, Relation r) {
  if (!r.holds) throw RelationError("relation " + name + " has no predicate");
  if (!relations_.emplace(name, std::move(r)).second) throw RelationError("relation " + name + " already registered");
}

const Relation* RelationRegistry::find(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

void RelationRegistry::check(std::string_view name, std::size_t arity) const {
  const Relation* r = find(name);
  if (!r) throw RelationError("unknown relation '" + std::string(name) + "'");
  if (r->arity && *r->arity != arity)
    throw RelationError("relation '" + std::string(name) + "' expects " + std::to_string(*r->arity) +
                        " arguments, got " + std::to_string(arity));
}

bool RelationRegistry::holds(std::string_view name, std::span<const Value> args) const {
  check(name, args.size());
  try {
    return find(name)->holds(args);
  } catch (const std::invalid_argument& e) {
    throw RelationError("relation '" + std::string(name) + "': " + e.what());
  }
}

RelationRegistry RelationRegistry::builtins() {
  RelationRegistry r;
  r.add("=", {2, [](std::span<const Value> a) { return a[0] == a[1]; }});
  r.add("!=", {2, [](std::span<const Value> a) { return a[0] != a[1]; }});
  r.add("<", {2, [](std::span<const Value> a) { return a[0].as_int() < a[1].as_int(); }});
  r.add("<=", {2, [](std::span<const Value> a) { return a[0].as_int() <= a[1].as_int(); }});
  r.add(">", {2, [](std::span<const Value> a) { return a[0].as_int() > a[1].as_int(); }});
  r.add(">=", {2, [](std::span<const Value> a) { return a[0].as_int() >= a[1].as_int(); }});
  // far_away(x1, y1, x2, y2, x3, y3): point 2 is farther from point 1 than point 3 is.
  r.add("far_away", {6, [](std::span<const Value> a) {
                       auto sq = [](std::int64_t dx, std::int64_t dy) { return dx * dx + dy * dy; };
                       const auto x1 = a[0].as_int(), y1 = a[1].as_int();
                       return sq(a[2].as_int() - x1, a[3].as_int() - y1) > sq(a[4].as_int() - x1, a[5].as_int() - y1);
                     }});
  return r;
}

namespace {

void validate_agent(AgentId a, const Vocabulary& vocab) {
  if (a.index >= vocab.num_agents()) throw std::invalid_argument("undeclared agent #" + std::to_string(a.index));
}

void validate_var(VarId v, const Vocabulary& vocab) {
  if (v.index >= vocab.num_vars()) throw std::invalid_argument("undeclared variable #" + std::to_string(v.index));
}

void validate_group(const std::vector<AgentId>& g, const Vocabulary& vocab) {
  if (g.empty()) throw std::invalid_argument("empty agent group");
  for (AgentId a : g) validate_agent(a, vocab);
}

}  // namespace

void validate(const Formula& f, const Vocabulary& vocab, const RelationRegistry& rels, std::size_t num_params) {
  auto recurse = [&](const Formula& sub) { validate(sub, vocab, rels, num_params); };
  std::visit(overloaded{
                 [&](const Rel& r) {
                   rels.check(r.name, r.args.size());
                   for (const Term& t : r.args) {
                     if (const auto* v = std::get_if<VarId>(&t)) validate_var(*v, vocab);
                     if (const auto* p = std::get_if<ParamRef>(&t); p && p->index >= num_params)
                       throw std::invalid_argument("parameter reference out of range");
                   }
                 },
                 [&](const Not& n) { recurse(*n.sub); },
                 [&](const And& a) {
                   recurse(*a.lhs);
                   recurse(*a.rhs);
                 },
                 [&](const SeesVar& s) {
                   validate_agent(s.agent, vocab);
                   validate_var(s.var, vocab);
                 },
                 [&](const Sees& s) {
                   validate_agent(s.agent, vocab);
                   recurse(*s.sub);
                 },
                 [&](const Knows& k) {
                   validate_agent(k.agent, vocab);
                   recurse(*k.sub);
                 },
                 [&](const GroupSees& g) {
                   validate_group(g.agents, vocab);
                   if (const auto* v = std::get_if<VarId>(&g.target))
                     validate_var(*v, vocab);
                   else
                     recurse(*std::get<FormulaRef>(g.target));
                 },
                 [&](const GroupKnows& g) {
                   validate_group(g.agents, vocab);
                   recurse(*g.sub);
                 },
             },
             f.node);
}

std::string to_string(const Term& t, const Vocabulary& vocab, std::span<const std::string> params) {
  return std::visit(overloaded{
                        [&](const VarId& v) { return vocab.var(v).name; },
                        [&](const Value& v) { return to_string(v); },
                        [&](const ParamRef& p) {
                          return p.index < params.size() ? params[p.index] : "$" + std::to_string(p.index);
                        },
                    },
                    t);
}

namespace {

bool is_infix(const std::string& name) {
  return name == "=" || name == "!=" || name == "<" || name == "<=" || name == ">" || name == ">=";
}

std::string group_prefix(GroupMode m, bool knowledge) {
  const char* mode = m == GroupMode::Everyone ? "E" : m == GroupMode::Distributed ? "D" : "C";
  return std::string(mode) + (knowledge ? "K" : "S");
}

std::string agent_list(const std::vector<AgentId>& g, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ",";
    out += vocab.agent_name(g[i]);
  }
  return out;
}

}  // namespace

// Operands of unary operators and `and` are parenthesized unless atomic-looking,
// so the output reparses to the same tree.
std::string to_string(const Formula& f, const Vocabulary& vocab, std::span<const std::string> params) {
  auto wrap = [&](const Formula& sub) { return "(" + to_string(sub, vocab, params) + ")"; };
  return std::visit(overloaded{
                        [&](const Rel& r) {
                          if (is_infix(r.name) && r.args.size() == 2)
                            return to_string(r.args[0], vocab, params) + " " + r.name + " " +
                                   to_string(r.args[1], vocab, params);
                          std::string out = r.name + "(";
                          for (std::size_t i = 0; i < r.args.size(); ++i) {
                            if (i) out += ", ";
                            out += to_string(r.args[i], vocab, params);
                          }
                          return out + ")";
                        },
                        [&](const Not& n) { return "not " + wrap(*n.sub); },
                        [&](const And& a) { return wrap(*a.lhs) + " and " + wrap(*a.rhs); },
                        [&](const SeesVar& s) { return "S[" + vocab.agent_name(s.agent) + "] " + vocab.var(s.var).name; },
                        [&](const Sees& s) { return "S[" + vocab.agent_name(s.agent) + "] " + wrap(*s.sub); },
                        [&](const Knows& k) { return "K[" + vocab.agent_name(k.agent) + "] " + wrap(*k.sub); },
                        [&](const GroupSees& g) {
                          std::string head = group_prefix(g.mode, false) + "[" + agent_list(g.agents, vocab) + "] ";
                          if (const auto* v = std::get_if<VarId>(&g.target)) return head + vocab.var(*v).name;
                          return head + wrap(*std::get<FormulaRef>(g.target));
                        },
                        [&](const GroupKnows& g) {
                          return group_prefix(g.mode, true) + "[" + agent_list(g.agents, vocab) + "] " + wrap(*g.sub);
                        },
                    },
                    f.node);
}

}  // namespace epiplan
