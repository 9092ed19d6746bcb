#include "epiplan/perspectives.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace epiplan {

void Perspective::check_agent(AgentId agent) const {
  if (agent.index >= num_agents_) throw std::out_of_range("unknown agent #" + std::to_string(agent.index));
}

namespace naming {
std::string pose_x(std::string_view agent) { return std::string(agent) + "_x"; }
std::string pose_y(std::string_view agent) { return std::string(agent) + "_y"; }
std::string pose_dir(std::string_view agent) { return std::string(agent) + "_dir"; }
std::string location(std::string_view agent) { return "at__" + std::string(agent); }
std::string latch(std::string_view agent, std::string_view var) {
  return "sees__" + std::string(agent) + "__" + std::string(var);
}
std::string friendship(std::string_view a, std::string_view b) {
  return "friended__" + std::string(a) + "__" + std::string(b);
}
std::string profile(std::string_view agent) { return "profile__" + std::string(agent); }
}  // namespace naming

namespace {

VarId var_at(std::size_t i) { return VarId{static_cast<std::uint32_t>(i)}; }

// An anchor coordinate: either a variable to read or a fixed integer.
struct Coord {
  std::optional<VarId> var;
  std::int64_t literal = 0;
};

Coord to_coord(const Term& t, const std::string& owner) {
  if (const auto* v = std::get_if<VarId>(&t)) return Coord{*v, 0};
  if (const auto* lit = std::get_if<Value>(&t)) {
    if (!lit->is_int()) throw PerspectiveError("anchor of " + owner + " must be an integer term");
    return Coord{std::nullopt, lit->as_int()};
  }
  throw PerspectiveError("anchor of " + owner + " refers to an operator parameter");
}

// Reads a coordinate, failing when its variable is not among `alive`.
std::optional<std::int64_t> read(const Coord& c, const LocalState& l, const std::vector<char>& alive) {
  if (!c.var) return c.literal;
  if (!alive[c.var->index]) return std::nullopt;
  return l.get(*c.var)->as_int();
}

// Support tables: support(i, v) = base(i) + direct(i, v) + support of v's anchors, closed transitively.
class SupportTable {
 public:
  SupportTable(std::size_t agents, std::size_t vars) : vars_(vars), table_(agents * vars, VarSet(vars)) {}

  VarSet& at(AgentId a, VarId v) { return table_[a.index * vars_ + v.index]; }
  const VarSet& at(AgentId a, VarId v) const { return table_[a.index * vars_ + v.index]; }

  void close(const std::vector<std::vector<VarId>>& anchors) {
    const std::size_t agents = vars_ ? table_.size() / vars_ : 0;
    for (std::size_t a = 0; a < agents; ++a) {
      AgentId agent{static_cast<std::uint32_t>(a)};
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < vars_; ++v) {
          for (VarId u : anchors[v]) {
            VarSet merged = at(agent, var_at(v)) | at(agent, u);
            merged.set(u.index);
            if (merged != at(agent, var_at(v))) {
              at(agent, var_at(v)) = std::move(merged);
              changed = true;
            }
          }
        }
      }
    }
  }

 private:
  std::size_t vars_;
  std::vector<VarSet> table_;
};

std::int64_t int_param(const PerspectiveSpec& spec, const std::string& name, std::optional<std::int64_t> fallback) {
  auto it = spec.params.find(name);
  if (it == spec.params.end()) {
    if (fallback) return *fallback;
    throw PerspectiveError(spec.kind + " requires parameter '" + name + "'");
  }
  if (!it->second.is_int()) throw PerspectiveError(spec.kind + " parameter '" + name + "' must be an integer");
  return it->second.as_int();
}

void reject_unknown_params(const PerspectiveSpec& spec, std::initializer_list<std::string_view> known) {
  for (const auto& [name, value] : spec.params) {
    bool ok = false;
    for (auto k : known) ok = ok || k == name;
    if (!ok) throw PerspectiveError("unknown parameter '" + name + "' for perspective " + spec.kind);
  }
}

class FullPerspective final : public Perspective {
 public:
  explicit FullPerspective(const Vocabulary& vocab) : Perspective(vocab.num_agents()), empty_(vocab.num_vars()) {}

  LocalState apply(AgentId agent, const LocalState& l) const override {
    check_agent(agent);
    return l;
  }
  const VarSet& support(AgentId agent, VarId) const override {
    check_agent(agent);
    return empty_;
  }

 private:
  VarSet empty_;
};

class Euclidean2d final : public Perspective {
 public:
  Euclidean2d(const Vocabulary& vocab, double aperture)
      : Perspective(vocab.num_agents()),
        half_(aperture / 2.0),
        kinds_(vocab.num_vars(), Kind::Hidden),
        anchors_(vocab.num_vars()),
        supports_(vocab.num_agents(), vocab.num_vars()) {
    std::vector<std::vector<VarId>> anchor_vars(vocab.num_vars());
    for (std::size_t v = 0; v < vocab.num_vars(); ++v) {
      const VarDecl& d = vocab.vars()[v];
      if (std::holds_alternative<NoAnchor>(d.anchor)) {
        kinds_[v] = Kind::Open;
      } else if (const auto* pos = std::get_if<PosAnchor>(&d.anchor)) {
        kinds_[v] = Kind::Cone;
        anchors_[v] = {to_coord(pos->x, d.name), to_coord(pos->y, d.name)};
        for (const Coord& c : anchors_[v])
          if (c.var) anchor_vars[v].push_back(*c.var);
      }
    }
    for (std::size_t a = 0; a < vocab.num_agents(); ++a) {
      const std::string& name = vocab.agents()[a];
      Pose p{vocab.find_var(naming::pose_x(name)), vocab.find_var(naming::pose_y(name)),
             vocab.find_var(naming::pose_dir(name))};
      poses_.push_back(p);
      VarSet base(vocab.num_vars());
      for (auto v : {p.x, p.y, p.dir})
        if (v) base.set(v->index);
      for (std::size_t v = 0; v < vocab.num_vars(); ++v) supports_.at(AgentId{static_cast<std::uint32_t>(a)}, var_at(v)) = base;
    }
    supports_.close(anchor_vars);
  }

  LocalState apply(AgentId agent, const LocalState& l) const override {
    check_agent(agent);
    LocalState out(l.universe());
    const Pose& pose = poses_[agent.index];
    if (!pose.x || !pose.y || !pose.dir || !l.contains(*pose.x) || !l.contains(*pose.y) || !l.contains(*pose.dir))
      return out;
    const std::int64_t x = l.get(*pose.x)->as_int();
    const std::int64_t y = l.get(*pose.y)->as_int();
    const std::int64_t dir = l.get(*pose.dir)->as_int();

    std::vector<char> alive(l.universe(), 0);
    for (std::size_t v = 0; v < l.universe(); ++v) alive[v] = l.contains(var_at(v)) && kinds_[v] != Kind::Hidden;
    auto own = [&](std::size_t v) { return v == pose.x->index || v == pose.y->index || v == pose.dir->index; };
    for (auto v : {pose.x, pose.y, pose.dir}) alive[v->index] = 1;

    // Greatest fixpoint: an entry survives only while its anchor coordinates are themselves visible.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < l.universe(); ++v) {
        if (!alive[v] || kinds_[v] != Kind::Cone || own(v)) continue;
        auto tx = read(anchors_[v][0], l, alive);
        auto ty = read(anchors_[v][1], l, alive);
        if (!tx || !ty || !in_cone(x, y, dir, *tx, *ty)) {
          alive[v] = 0;
          changed = true;
        }
      }
    }
    for (std::size_t v = 0; v < l.universe(); ++v)
      if (alive[v]) out.set(var_at(v), *l.get(var_at(v)));
    return out;
  }

  const VarSet& support(AgentId agent, VarId v) const override {
    check_agent(agent);
    return supports_.at(agent, v);
  }

 private:
  enum class Kind : std::uint8_t { Open, Cone, Hidden };
  struct Pose {
    std::optional<VarId> x, y, dir;
  };

  bool in_cone(std::int64_t x, std::int64_t y, std::int64_t dir, std::int64_t tx, std::int64_t ty) const {
    if (tx == x && ty == y) return true;
    const double bearing =
        std::atan2(static_cast<double>(ty - y), static_cast<double>(tx - x)) * 180.0 / std::numbers::pi;
    double delta = std::fmod(bearing - static_cast<double>(dir), 360.0);
    if (delta <= -180.0) delta += 360.0;
    if (delta > 180.0) delta -= 360.0;
    return std::abs(delta) <= half_ + 1e-9;
  }

  double half_;
  std::vector<Kind> kinds_;
  std::vector<std::vector<Coord>> anchors_;
  std::vector<Pose> poses_;
  SupportTable supports_;
};

// Splits "sees__<agent>__<var>"; the agent part contains no "__".
std::optional<std::pair<std::string, std::string>> parse_latch(std::string_view name) {
  constexpr std::string_view prefix = "sees__";
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  name.remove_prefix(prefix.size());
  auto sep = name.find("__");
  if (sep == std::string_view::npos || sep == 0 || sep + 2 >= name.size()) return std::nullopt;
  return std::pair{std::string(name.substr(0, sep)), std::string(name.substr(sep + 2))};
}

class LatchedRooms final : public Perspective {
 public:
  LatchedRooms(const Vocabulary& vocab, std::int64_t radius)
      : Perspective(vocab.num_agents()), radius_(radius), supports_(vocab.num_agents(), vocab.num_vars()) {
    const std::size_t n = vocab.num_vars();
    std::vector<char> latched(n, 0);
    latch_var_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (auto parts = parse_latch(vocab.vars()[v].name)) {
        latch_var_[v] = 1;
        if (auto target = vocab.find_var(parts->second)) latched[target->index] = 1;
      }
    }
    rooms_.resize(n);
    std::vector<std::vector<VarId>> anchor_vars(n);
    for (std::size_t v = 0; v < n; ++v) {
      const VarDecl& d = vocab.vars()[v];
      if (latched[v]) {
        rule_.push_back(Rule::Latched);
      } else if (latch_var_[v]) {
        rule_.push_back(Rule::Always);
      } else if (const auto* room = std::get_if<RoomAnchor>(&d.anchor)) {
        rule_.push_back(Rule::Room);
        rooms_[v] = to_coord(room->room, d.name);
        if (rooms_[v].var) anchor_vars[v].push_back(*rooms_[v].var);
      } else if (std::holds_alternative<NoAnchor>(d.anchor) && d.kind == VarKind::Constant) {
        rule_.push_back(Rule::Always);
      } else {
        rule_.push_back(Rule::Hidden);
      }
    }
    for (std::size_t a = 0; a < vocab.num_agents(); ++a) {
      const std::string& name = vocab.agents()[a];
      AgentId agent{static_cast<std::uint32_t>(a)};
      auto loc = vocab.find_var(naming::location(name));
      location_.push_back(loc);
      std::vector<std::optional<VarId>> own_latch(n);
      for (std::size_t v = 0; v < n; ++v)
        if (latched[v]) own_latch[v] = vocab.find_var(naming::latch(name, vocab.vars()[v].name));
      latch_of_.push_back(std::move(own_latch));
      for (std::size_t v = 0; v < n; ++v) {
        VarSet& s = supports_.at(agent, var_at(v));
        if (loc) s.set(loc->index);
        if (rule_[v] == Rule::Latched && latch_of_[a][v]) s.set(latch_of_[a][v]->index);
      }
    }
    supports_.close(anchor_vars);
  }

  LocalState apply(AgentId agent, const LocalState& l) const override {
    check_agent(agent);
    LocalState out(l.universe());
    const auto& loc = location_[agent.index];
    if (!loc || !l.contains(*loc)) return out;
    const std::int64_t here = l.get(*loc)->as_int();

    std::vector<char> alive(l.universe(), 0);
    for (std::size_t v = 0; v < l.universe(); ++v) {
      VarId id = var_at(v);
      if (!l.contains(id)) continue;
      switch (rule_[v]) {
        case Rule::Always:
        case Rule::Room:
          alive[v] = 1;
          break;
        case Rule::Latched: {
          const auto& flag = latch_of_[agent.index][v];
          const Value* seen = flag ? l.get(*flag) : nullptr;
          alive[v] = seen && truthy(*seen);
          break;
        }
        case Rule::Hidden:
          break;
      }
    }
    alive[loc->index] = 1;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < l.universe(); ++v) {
        if (!alive[v] || rule_[v] != Rule::Room || v == loc->index) continue;
        auto room = read(rooms_[v], l, alive);
        if (!room || std::abs(*room - here) > radius_) {
          alive[v] = 0;
          changed = true;
        }
      }
    }
    for (std::size_t v = 0; v < l.universe(); ++v)
      if (alive[v]) out.set(var_at(v), *l.get(var_at(v)));
    return out;
  }

  const VarSet& support(AgentId agent, VarId v) const override {
    check_agent(agent);
    return supports_.at(agent, v);
  }

 private:
  enum class Rule : std::uint8_t { Always, Room, Latched, Hidden };

  static bool truthy(const Value& v) { return v.is_bool() ? v.as_bool() : v.is_int() && v.as_int() != 0; }

  std::int64_t radius_;
  std::vector<Rule> rule_;
  std::vector<char> latch_var_;
  std::vector<Coord> rooms_;
  std::vector<std::optional<VarId>> location_;
  std::vector<std::vector<std::optional<VarId>>> latch_of_;
  SupportTable supports_;
};

class Social final : public Perspective {
 public:
  explicit Social(const Vocabulary& vocab)
      : Perspective(vocab.num_agents()), supports_(vocab.num_agents(), vocab.num_vars()) {
    const std::size_t n = vocab.num_vars();
    const std::size_t m = vocab.num_agents();
    for (std::size_t a = 0; a < m; ++a) agent_of_[Symbol::intern(vocab.agents()[a]).id()] = a;
    friends_.assign(m, std::vector<std::optional<VarId>>(m));
    identity_.resize(m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        auto v = vocab.find_var(naming::friendship(vocab.agents()[a], vocab.agents()[b]));
        if (v) friends_[a][b] = friends_[b][a] = v;
      }
    for (std::size_t v = 0; v < n; ++v) {
      const VarDecl& d = vocab.vars()[v];
      const bool is_friendship = d.name.rfind("friended__", 0) == 0;
      if (std::holds_alternative<PageAnchor>(d.anchor)) {
        rule_.push_back(Rule::Page);
        if (d.kind == VarKind::Constant && d.initial.is_symbol())
          if (auto owner = agent_index(d.initial)) identity_[*owner].push_back(var_at(v));
      } else if (is_friendship || (std::holds_alternative<NoAnchor>(d.anchor) && d.kind == VarKind::Constant)) {
        rule_.push_back(Rule::Always);
      } else {
        rule_.push_back(Rule::Hidden);
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      AgentId agent{static_cast<std::uint32_t>(a)};
      VarSet base(n);
      for (VarId id : identity_[a]) base.set(id.index);
      VarSet page = base;
      for (const auto& f : friends_[a])
        if (f) page.set(f->index);
      for (std::size_t v = 0; v < n; ++v) {
        supports_.at(agent, var_at(v)) = rule_[v] == Rule::Page ? page : base;
        if (rule_[v] == Rule::Page) supports_.at(agent, var_at(v)).set(v);
      }
    }
  }

  LocalState apply(AgentId agent, const LocalState& l) const override {
    check_agent(agent);
    LocalState out(l.universe());
    for (VarId id : identity_[agent.index])
      if (!l.contains(id)) return out;
    const auto& own = identity_[agent.index];
    for (std::size_t v = 0; v < l.universe(); ++v) {
      const Value* value = l.get(var_at(v));
      if (!value) continue;
      bool visible = std::find(own.begin(), own.end(), var_at(v)) != own.end();
      switch (rule_[v]) {
        case Rule::Always:
          visible = true;
          break;
        case Rule::Page:
          if (auto owner = agent_index(*value)) {
            if (*owner == agent.index) {
              visible = true;
            } else if (const auto& f = friends_[agent.index][*owner]) {
              const Value* linked = l.get(*f);
              visible = visible || (linked && linked->is_bool() && linked->as_bool());
            }
          }
          break;
        case Rule::Hidden:
          break;
      }
      if (visible) out.set(var_at(v), *value);
    }
    return out;
  }

  const VarSet& support(AgentId agent, VarId v) const override {
    check_agent(agent);
    return supports_.at(agent, v);
  }

 private:
  enum class Rule : std::uint8_t { Always, Page, Hidden };

  std::optional<std::size_t> agent_index(const Value& v) const {
    if (!v.is_symbol()) return std::nullopt;
    auto it = agent_of_.find(v.as_symbol().id());
    if (it == agent_of_.end()) return std::nullopt;
    return it->second;
  }

  std::unordered_map<std::uint32_t, std::size_t> agent_of_;
  std::vector<std::vector<std::optional<VarId>>> friends_;
  std::vector<std::vector<VarId>> identity_;
  std::vector<Rule> rule_;
  SupportTable supports_;
};

PerspectiveRegistry make_builtins() {
  PerspectiveRegistry r;
  r.add("full", [](const PerspectiveSpec& spec, const Vocabulary& vocab) -> std::unique_ptr<Perspective> {
    reject_unknown_params(spec, {});
    return std::make_unique<FullPerspective>(vocab);
  });
  r.add("euclidean2d", [](const PerspectiveSpec& spec, const Vocabulary& vocab) -> std::unique_ptr<Perspective> {
    reject_unknown_params(spec, {"aperture"});
    const std::int64_t aperture = int_param(spec, "aperture", 90);
    if (aperture <= 0 || aperture > 360) throw PerspectiveError("aperture must lie in (0, 360]");
    return std::make_unique<Euclidean2d>(vocab, static_cast<double>(aperture));
  });
  r.add("latched-rooms", [](const PerspectiveSpec& spec, const Vocabulary& vocab) -> std::unique_ptr<Perspective> {
    reject_unknown_params(spec, {"radius"});
    const std::int64_t radius = int_param(spec, "radius", 1);
    if (radius < 0) throw PerspectiveError("radius must be non-negative");
    return std::make_unique<LatchedRooms>(vocab, radius);
  });
  r.add("social", [](const PerspectiveSpec& spec, const Vocabulary& vocab) -> std::unique_ptr<Perspective> {
    reject_unknown_params(spec, {});
    return std::make_unique<Social>(vocab);
  });
  return r;
}

}  // namespace

void PerspectiveRegistry::add(std::string kind, PerspectiveFactory factory) {
  factories_[std::move(kind)] = std::move(factory);
}

std::vector<std::string> PerspectiveRegistry::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, f] : factories_) out.push_back(k);
  return out;
}

std::unique_ptr<Perspective> PerspectiveRegistry::make(const PerspectiveSpec& spec, const Vocabulary& vocab) const {
  auto it = factories_.find(spec.kind);
  if (it == factories_.end()) throw PerspectiveError("unknown perspective kind '" + spec.kind + "'");
  return it->second(spec, vocab);
}

const PerspectiveRegistry& PerspectiveRegistry::builtins() {
  static const PerspectiveRegistry registry = make_builtins();
  return registry;
}

std::unique_ptr<Perspective> make_perspective(const PerspectiveSpec& spec, const Vocabulary& vocab) {
  return PerspectiveRegistry::builtins().make(spec, vocab);
}

LocalState apply_perspective(const PerspectiveSpec& spec, const Vocabulary& vocab, AgentId agent,
                             const LocalState& l) {
  return make_perspective(spec, vocab)->apply(agent, l);
}

}  // namespace epiplan
