#include "epiplan/epistemic.hpp"

#include <algorithm>
#include <map>

namespace epiplan {

EvalContext::EvalContext(std::shared_ptr<const Perspective> perspective, RelationRegistry relations)
    : perspective_(std::move(perspective)), relations_(std::move(relations)) {
  if (!perspective_) throw std::invalid_argument("evaluation context needs a perspective");
}

LocalState fc(const EvalContext& ctx, std::span<const AgentId> group, const LocalState& l) {
  if (group.empty()) throw std::invalid_argument("fc over an empty group");
  LocalState current = l;
  // Each round is contracting, so the sequence shrinks until stable.
  for (std::size_t round = 0; round <= l.universe(); ++round) {
    LocalState next = ctx.perspective().apply(group[0], current);
    for (std::size_t k = 1; k < group.size(); ++k) next = intersect(next, ctx.perspective().apply(group[k], current));
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// A local-state source: one agent, the union of a group (distributed), or the
// group's common perspective. Singleton groups collapse to the agent view.
struct View {
  enum class Kind : std::uint8_t { Agent, Dist, Common };
  Kind kind = Kind::Agent;
  std::vector<AgentId> agents;

  static View agent(AgentId a) { return View{Kind::Agent, {a}}; }
  static View of(GroupMode m, const std::vector<AgentId>& g) {
    if (g.size() == 1) return agent(g[0]);
    return View{m == GroupMode::Common ? Kind::Common : Kind::Dist, g};
  }
  bool has(AgentId a) const { return std::find(agents.begin(), agents.end(), a) != agents.end(); }
  friend auto operator<=>(const View&, const View&) = default;
};

// Whether view v is, by construction, informed about what view x sees.
bool self_of(const View& v, const View& x) {
  if (v.kind == View::Kind::Common) return false;
  if (x.kind == View::Kind::Agent) return v.has(x.agents[0]);
  if (x.kind == View::Kind::Dist && v.kind == View::Kind::Dist)
    return std::includes(v.agents.begin(), v.agents.end(), x.agents.begin(), x.agents.end());
  return false;
}

class Evaluation {
 public:
  Evaluation(const EvalContext& ctx, const LocalState& l)
      : ctx_(ctx), p_(ctx.perspective()), l_(l), n_(l.universe()) {}

  bool truth(const Formula& f) {
    return std::visit(
        overloaded{
            [&](const Rel& r) { return holds(r); },
            [&](const Not& n) { return !truth(*n.sub); },
            [&](const And& a) { return truth(*a.lhs) && truth(*a.rhs); },
            [&](const SeesVar& s) {
              ctx_.count_call();
              return domain(View::agent(s.agent)).test(s.var.index);
            },
            [&](const Sees& s) {
              ctx_.count_call();
              return sees(View::agent(s.agent), *s.sub);
            },
            [&](const Knows& k) {
              ctx_.count_call();
              return truth(*k.sub) && sees(View::agent(k.agent), *k.sub);
            },
            [&](const GroupSees& g) {
              ctx_.count_call();
              if (g.mode == GroupMode::Everyone)
                return std::all_of(g.agents.begin(), g.agents.end(),
                                   [&](AgentId a) { return sees_target(View::agent(a), g.target); });
              return sees_target(View::of(g.mode, g.agents), g.target);
            },
            [&](const GroupKnows& g) {
              ctx_.count_call();
              if (!truth(*g.sub)) return false;
              if (g.mode == GroupMode::Everyone)
                return std::all_of(g.agents.begin(), g.agents.end(),
                                   [&](AgentId a) { return sees(View::agent(a), *g.sub); });
              return sees(View::of(g.mode, g.agents), *g.sub);
            },
        },
        f.node);
  }

 private:
  bool holds(const Rel& r) {
    std::vector<Value> args;
    args.reserve(r.args.size());
    for (const Term& t : r.args) {
      if (const auto* v = std::get_if<VarId>(&t)) {
        const Value* value = l_.get(*v);
        if (!value) return false;
        args.push_back(*value);
      } else if (const auto* lit = std::get_if<Value>(&t)) {
        args.push_back(*lit);
      } else {
        throw std::invalid_argument("cannot evaluate a formula with unbound parameters");
      }
    }
    return ctx_.relations().holds(r.name, args);
  }

  const VarSet& domain(const View& v) {
    auto it = domains_.find(v);
    if (it != domains_.end()) return it->second;
    VarSet d(n_);
    switch (v.kind) {
      case View::Kind::Agent:
        d = p_.apply(v.agents[0], l_).domain();
        break;
      case View::Kind::Dist:
        for (AgentId a : v.agents) d |= domain(View::agent(a));
        break;
      case View::Kind::Common:
        d = fc(ctx_, v.agents, l_).domain();
        break;
    }
    return domains_.emplace(v, std::move(d)).first->second;
  }

  // Variables whose values decide whether view v holds variable u.
  VarSet supp(const View& v, VarId u) {
    switch (v.kind) {
      case View::Kind::Agent:
        return p_.support(v.agents[0], u);
      case View::Kind::Dist: {
        VarSet out(n_);
        for (AgentId a : v.agents) out |= p_.support(a, u);
        return out;
      }
      case View::Kind::Common: {
        VarSet out(n_);
        for (AgentId a : v.agents) out |= p_.support(a, u);
        for (VarSet frontier = out; frontier.any();) {
          VarSet grown = out;
          for (auto w = frontier.find_first(); w != VarSet::npos; w = frontier.find_next(w))
            for (AgentId a : v.agents) grown |= p_.support(a, VarId{static_cast<std::uint32_t>(w)});
          frontier = grown - out;
          out = std::move(grown);
        }
        return out;
      }
    }
    return VarSet(n_);
  }

  VarSet supp_all(const View& v, const VarSet& us) {
    VarSet out(n_);
    for (auto u = us.find_first(); u != VarSet::npos; u = us.find_next(u))
      out |= supp(v, VarId{static_cast<std::uint32_t>(u)});
    return out;
  }

  VarSet dep_target(const View& v, const GroupTarget& t) {
    if (const auto* var = std::get_if<VarId>(&t)) return supp(v, *var);
    return dep(v, *std::get<FormulaRef>(t));
  }

  // Dependencies of "view v sees whether x sees t".
  VarSet dep_sees(const View& v, const View& x, const GroupTarget& t) {
    if (self_of(v, x)) return VarSet(n_);
    return supp_all(v, dep_target(x, t));
  }

  VarSet dep_knows(const View& v, const View& x, const Formula& f) {
    return dep_sees(v, x, FormulaRef(f)) | dep(x, f) | dep(v, f);
  }

  // Variables whose values decide the truth of sees(v, f).
  VarSet dep(const View& v, const Formula& f) {
    return std::visit(
        overloaded{
            [&](const Rel& r) {
              VarSet out(n_);
              for (const Term& t : r.args)
                if (const auto* u = std::get_if<VarId>(&t)) out |= supp(v, *u);
              return out;
            },
            [&](const Not& n) { return dep(v, *n.sub); },
            [&](const And& a) { return dep(v, *a.lhs) | dep(v, *a.rhs); },
            [&](const SeesVar& s) { return dep_sees(v, View::agent(s.agent), s.var); },
            [&](const Sees& s) { return dep_sees(v, View::agent(s.agent), s.sub); },
            [&](const Knows& k) { return dep_knows(v, View::agent(k.agent), *k.sub); },
            [&](const GroupSees& g) {
              if (g.mode != GroupMode::Everyone) return dep_sees(v, View::of(g.mode, g.agents), g.target);
              VarSet out(n_);
              for (AgentId a : g.agents) out |= dep_sees(v, View::agent(a), g.target);
              return out;
            },
            [&](const GroupKnows& g) {
              if (g.mode != GroupMode::Everyone) return dep_knows(v, View::of(g.mode, g.agents), *g.sub);
              VarSet out(n_);
              for (AgentId a : g.agents) out |= dep_knows(v, View::agent(a), *g.sub);
              return out;
            },
        },
        f.node);
  }

  // Whether v can see (the truth of) target t.
  bool sees_target(const View& v, const GroupTarget& t) {
    if (const auto* var = std::get_if<VarId>(&t)) return domain(v).test(var->index);
    return sees(v, *std::get<FormulaRef>(t));
  }

  // Whether v sees what x sees about t.
  bool sees_sees(const View& v, const View& x, const GroupTarget& t) {
    return self_of(v, x) || dep_target(x, t).is_subset_of(domain(v));
  }

  bool sees_knows(const View& v, const View& x, const Formula& f) {
    return sees_sees(v, x, FormulaRef(f)) && (!sees(x, f) || sees(v, f));
  }

  bool sees(const View& v, const Formula& f) {
    return std::visit(
        overloaded{
            [&](const Rel& r) {
              const VarSet& d = domain(v);
              return std::all_of(r.args.begin(), r.args.end(), [&](const Term& t) {
                const auto* u = std::get_if<VarId>(&t);
                return !u || d.test(u->index);
              });
            },
            [&](const Not& n) { return sees(v, *n.sub); },
            [&](const And& a) { return sees(v, *a.lhs) && sees(v, *a.rhs); },
            [&](const SeesVar& s) {
              ctx_.count_call();
              return sees_sees(v, View::agent(s.agent), s.var);
            },
            [&](const Sees& s) {
              ctx_.count_call();
              return sees_sees(v, View::agent(s.agent), s.sub);
            },
            [&](const Knows& k) {
              ctx_.count_call();
              return sees_knows(v, View::agent(k.agent), *k.sub);
            },
            [&](const GroupSees& g) {
              ctx_.count_call();
              if (g.mode != GroupMode::Everyone) return sees_sees(v, View::of(g.mode, g.agents), g.target);
              return std::all_of(g.agents.begin(), g.agents.end(),
                                 [&](AgentId a) { return sees_sees(v, View::agent(a), g.target); });
            },
            [&](const GroupKnows& g) {
              ctx_.count_call();
              if (g.mode != GroupMode::Everyone) return sees_knows(v, View::of(g.mode, g.agents), *g.sub);
              return std::all_of(g.agents.begin(), g.agents.end(),
                                 [&](AgentId a) { return sees_knows(v, View::agent(a), *g.sub); });
            },
        },
        f.node);
  }

  const EvalContext& ctx_;
  const Perspective& p_;
  const LocalState& l_;
  std::size_t n_;
  std::map<View, VarSet> domains_;
};

}  // namespace

bool eval(const EvalContext& ctx, const Formula& f, const LocalState& l) { return Evaluation(ctx, l).truth(f); }

bool eval(const EvalContext& ctx, const Formula& f, const State& s) { return eval(ctx, f, s.local()); }

}  // namespace epiplan
