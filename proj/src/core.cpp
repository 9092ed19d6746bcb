#include "epiplan/core.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace epiplan {

namespace {

class SymbolTable {
 public:
  SymbolTable() { names_.emplace_back(); index_.emplace(names_.front(), 0); }

  std::uint32_t intern(std::string_view text) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(text); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(text); it != index_.end()) return it->second;
    names_.emplace_back(text);
    auto id = static_cast<std::uint32_t>(names_.size() - 1);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::string_view name(std::uint32_t id) {
    std::shared_lock lock(mutex_);
    return names_.at(id);
  }

 private:
  std::shared_mutex mutex_;
  std::deque<std::string> names_;  // deque keeps string storage stable
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

SymbolTable& symbols() {
  static SymbolTable table;
  return table;
}

}  // namespace

Symbol Symbol::intern(std::string_view text) { return Symbol(symbols().intern(text)); }

std::string_view Symbol::str() const { return symbols().name(id_); }

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw std::invalid_argument("value " + to_string(*this) + " is not an integer");
  return raw_;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw std::invalid_argument("value " + to_string(*this) + " is not a boolean");
  return raw_ != 0;
}

Symbol Value::as_symbol() const {
  if (kind_ != Kind::Sym) throw std::invalid_argument("value " + to_string(*this) + " is not a symbol");
  return Symbol(static_cast<std::uint32_t>(raw_));
}

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return std::to_string(v.as_int());
    case Value::Kind::Bool:
      return v.as_bool() ? "true" : "false";
    case Value::Kind::Sym:
      return std::string(v.as_symbol().str());
  }
  return {};
}

Domain Domain::range(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty integer range " + std::to_string(lo) + ".." + std::to_string(hi));
  Domain d;
  d.kind_ = Kind::Range;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::boolean() {
  Domain d;
  d.kind_ = Kind::Bool;
  return d;
}

Domain Domain::set(std::vector<Value> values) {
  if (values.empty()) throw std::invalid_argument("empty value set");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j]) throw std::invalid_argument("duplicate value " + to_string(values[i]) + " in set");
  Domain d;
  d.kind_ = Kind::Set;
  d.values_ = std::move(values);
  return d;
}

bool Domain::contains(const Value& v) const { return index_of(v).has_value(); }

std::size_t Domain::size() const {
  switch (kind_) {
    case Kind::Range:
      return static_cast<std::size_t>(hi_ - lo_ + 1);
    case Kind::Bool:
      return 2;
    case Kind::Set:
      return values_.size();
  }
  return 0;
}

std::optional<std::size_t> Domain::index_of(const Value& v) const {
  switch (kind_) {
    case Kind::Range:
      if (v.is_int() && v.as_int() >= lo_ && v.as_int() <= hi_) return static_cast<std::size_t>(v.as_int() - lo_);
      return std::nullopt;
    case Kind::Bool:
      if (v.is_bool()) return v.as_bool() ? 1 : 0;
      return std::nullopt;
    case Kind::Set: {
      auto it = std::find(values_.begin(), values_.end(), v);
      if (it == values_.end()) return std::nullopt;
      return static_cast<std::size_t>(it - values_.begin());
    }
  }
  return std::nullopt;
}

Value Domain::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("domain index out of range");
  switch (kind_) {
    case Kind::Range:
      return Value::integer(lo_ + static_cast<std::int64_t>(i));
    case Kind::Bool:
      return Value::boolean(i == 1);
    case Kind::Set:
      return values_[i];
  }
  return {};
}

Value Domain::coerce(const Value& v) const {
  if (kind_ == Kind::Bool && v.is_int() && (v.as_int() == 0 || v.as_int() == 1)) return Value::boolean(v.as_int() == 1);
  return v;
}

std::string to_string(const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::Range:
      return std::to_string(d.lo()) + ".." + std::to_string(d.hi());
    case Domain::Kind::Bool:
      return "bool";
    case Domain::Kind::Set: {
      std::string out = "{";
      for (std::size_t i = 0; i < d.members().size(); ++i) {
        if (i) out += ", ";
        out += to_string(d.members()[i]);
      }
      return out + "}";
    }
  }
  return {};
}

AgentId Vocabulary::add_agent(std::string name) {
  if (name.empty()) throw std::invalid_argument("agent name must be nonempty");
  if (find_agent(name)) throw std::invalid_argument("duplicate agent " + name);
  agents_.push_back(std::move(name));
  return AgentId{static_cast<std::uint32_t>(agents_.size() - 1)};
}

VarId Vocabulary::add_var(VarDecl decl) {
  if (find_var(decl.name)) throw std::invalid_argument("duplicate variable " + decl.name);
  vars_.push_back(std::move(decl));
  return VarId{static_cast<std::uint32_t>(vars_.size() - 1)};
}

std::optional<VarId> Vocabulary::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return VarId{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

std::optional<AgentId> Vocabulary::find_agent(std::string_view name) const {
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i] == name) return AgentId{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

VarId Vocabulary::require_var(std::string_view name) const {
  if (auto v = find_var(name)) return *v;
  throw std::invalid_argument("unknown variable " + std::string(name));
}

AgentId Vocabulary::require_agent(std::string_view name) const {
  if (auto a = find_agent(name)) return *a;
  throw std::invalid_argument("unknown agent " + std::string(name));
}

LocalState State::local() const {
  LocalState l(values_.size());
  for (std::uint32_t i = 0; i < values_.size(); ++i) l.set(VarId{i}, values_[i]);
  return l;
}

std::size_t LocalState::count() const {
  return static_cast<std::size_t>(std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); }));
}

VarSet LocalState::domain() const {
  VarSet out(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i]) out.set(i);
  return out;
}

bool LocalState::subset_of(const LocalState& other) const {
  if (other.universe() != universe()) return false;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i] && (!other.slots_[i] || *other.slots_[i] != *slots_[i])) return false;
  return true;
}

std::size_t LocalState::hash() const {
  std::size_t h = slots_.size();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) continue;
    h ^= (slots_[i]->hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)) * (i + 1);
  }
  return h;
}

LocalState restrict(const State& s, const VarSet& keep) {
  LocalState out(s.size());
  for (std::size_t i = keep.find_first(); i != VarSet::npos && i < s.size(); i = keep.find_next(i))
    out.set(VarId{static_cast<std::uint32_t>(i)}, s[VarId{static_cast<std::uint32_t>(i)}]);
  return out;
}

LocalState restrict(const LocalState& l, const VarSet& keep) {
  LocalState out(l.universe());
  for (std::size_t i = keep.find_first(); i != VarSet::npos && i < l.universe(); i = keep.find_next(i)) {
    VarId v{static_cast<std::uint32_t>(i)};
    if (const Value* value = l.get(v)) out.set(v, *value);
  }
  return out;
}

namespace {

void check_universe(const LocalState& a, const LocalState& b) {
  if (a.universe() != b.universe()) throw InvariantError("local states over different variable sets");
}

const Value* agreed(const LocalState& a, const LocalState& b, VarId v) {
  const Value* x = a.get(v);
  const Value* y = b.get(v);
  if (x && y && *x != *y) throw InvariantError("local states disagree on variable #" + std::to_string(v.index));
  return x ? x : y;
}

}  // namespace

LocalState intersect(const LocalState& a, const LocalState& b) {
  check_universe(a, b);
  LocalState out(a.universe());
  for (std::uint32_t i = 0; i < a.universe(); ++i) {
    VarId v{i};
    const Value* value = agreed(a, b, v);
    if (a.contains(v) && b.contains(v)) out.set(v, *value);
  }
  return out;
}

LocalState unite(const LocalState& a, const LocalState& b) {
  check_universe(a, b);
  LocalState out(a.universe());
  for (std::uint32_t i = 0; i < a.universe(); ++i) {
    VarId v{i};
    if (const Value* value = agreed(a, b, v)) out.set(v, *value);
  }
  return out;
}

}  // namespace epiplan
