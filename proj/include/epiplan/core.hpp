#pragma once

#include <boost/dynamic_bitset.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace epiplan {

// Interned name. Identity comparison is exact and cheap.
class Symbol {
 public:
  Symbol() = default;
  static Symbol intern(std::string_view text);
  std::string_view str() const;
  std::uint32_t id() const { return id_; }
  friend bool operator==(Symbol, Symbol) = default;
  friend auto operator<=>(Symbol, Symbol) = default;

 private:
  friend class Value;
  explicit Symbol(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Sym };

  Value() = default;
  static Value integer(std::int64_t v) { return Value(Kind::Int, v); }
  static Value boolean(bool v) { return Value(Kind::Bool, v ? 1 : 0); }
  static Value symbol(Symbol s) { return Value(Kind::Sym, s.id()); }
  static Value symbol(std::string_view s) { return symbol(Symbol::intern(s)); }

  Kind kind() const { return kind_; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_symbol() const { return kind_ == Kind::Sym; }

  std::int64_t as_int() const;
  bool as_bool() const;
  Symbol as_symbol() const;

  std::size_t hash() const {
    return std::hash<std::int64_t>{}(raw_) * 31u + static_cast<std::size_t>(kind_);
  }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Value(Kind k, std::int64_t raw) : kind_(k), raw_(raw) {}
  Kind kind_ = Kind::Int;
  std::int64_t raw_ = 0;
};

std::string to_string(const Value& v);

class Domain {
 public:
  enum class Kind : std::uint8_t { Range, Bool, Set };

  static Domain range(std::int64_t lo, std::int64_t hi);
  static Domain boolean();
  static Domain set(std::vector<Value> values);

  Kind kind() const { return kind_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  const std::vector<Value>& members() const { return values_; }

  bool contains(const Value& v) const;
  std::size_t size() const;
  std::optional<std::size_t> index_of(const Value& v) const;
  Value at(std::size_t i) const;
  // Integer literals 0/1 stand for booleans in bool domains.
  Value coerce(const Value& v) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Kind kind_ = Kind::Range;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;
  std::vector<Value> values_;
};

std::string to_string(const Domain& d);

struct VarId {
  std::uint32_t index = 0;
  friend auto operator<=>(VarId, VarId) = default;
};

struct AgentId {
  std::uint32_t index = 0;
  friend auto operator<=>(AgentId, AgentId) = default;
};

// A term is a variable reference, a literal, or (inside operator schemas) a
// parameter reference that grounding replaces with a literal.
struct ParamRef {
  std::uint32_t index = 0;
  friend bool operator==(ParamRef, ParamRef) = default;
};

using Term = std::variant<VarId, Value, ParamRef>;

struct NoAnchor {
  friend bool operator==(NoAnchor, NoAnchor) = default;
};
struct PosAnchor {
  Term x;
  Term y;
  friend bool operator==(const PosAnchor&, const PosAnchor&) = default;
};
struct RoomAnchor {
  Term room;
  friend bool operator==(const RoomAnchor&, const RoomAnchor&) = default;
};
// The owning page is read from the variable's own value.
struct PageAnchor {
  friend bool operator==(PageAnchor, PageAnchor) = default;
};

using Anchor = std::variant<NoAnchor, PosAnchor, RoomAnchor, PageAnchor>;

enum class VarKind : std::uint8_t { Fluent, Constant };

struct VarDecl {
  std::string name;
  Domain domain;
  VarKind kind = VarKind::Fluent;
  Anchor anchor;
  Value initial;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

using VarSet = boost::dynamic_bitset<>;

class Vocabulary {
 public:
  AgentId add_agent(std::string name);
  VarId add_var(VarDecl decl);

  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<VarDecl>& vars() const { return vars_; }
  const VarDecl& var(VarId v) const { return vars_.at(v.index); }
  const std::string& agent_name(AgentId a) const { return agents_.at(a.index); }
  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_agents() const { return agents_.size(); }

  std::optional<VarId> find_var(std::string_view name) const;
  std::optional<AgentId> find_agent(std::string_view name) const;
  VarId require_var(std::string_view name) const;
  AgentId require_agent(std::string_view name) const;

  VarSet empty_set() const { return VarSet(vars_.size()); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<std::string> agents_;
  std::vector<VarDecl> vars_;
};

class LocalState;

// Total assignment over every declared variable.
class State {
 public:
  State() = default;
  explicit State(std::vector<Value> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  const Value& operator[](VarId v) const { return values_[v.index]; }
  void set(VarId v, Value value) { values_[v.index] = value; }
  const std::vector<Value>& values() const { return values_; }
  LocalState local() const;

  friend bool operator==(const State&, const State&) = default;

 private:
  std::vector<Value> values_;
};

// Partial assignment; the universe size is the number of declared variables.
class LocalState {
 public:
  LocalState() = default;
  explicit LocalState(std::size_t universe) : slots_(universe) {}

  std::size_t universe() const { return slots_.size(); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool contains(VarId v) const { return v.index < slots_.size() && slots_[v.index].has_value(); }
  const Value* get(VarId v) const {
    return contains(v) ? &*slots_[v.index] : nullptr;
  }
  void set(VarId v, Value value) { slots_.at(v.index) = value; }
  void erase(VarId v) { slots_.at(v.index).reset(); }
  VarSet domain() const;
  bool subset_of(const LocalState& other) const;
  std::size_t hash() const;

  friend bool operator==(const LocalState&, const LocalState&) = default;

 private:
  std::vector<std::optional<Value>> slots_;
};

// Raised when two local states disagree on a shared variable.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

LocalState restrict(const State& s, const VarSet& keep);
LocalState restrict(const LocalState& l, const VarSet& keep);
LocalState intersect(const LocalState& a, const LocalState& b);
LocalState unite(const LocalState& a, const LocalState& b);

}  // namespace epiplan

template <>
struct std::hash<epiplan::Value> {
  std::size_t operator()(const epiplan::Value& v) const noexcept { return v.hash(); }
};
