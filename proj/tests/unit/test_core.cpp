#include "epiplan/core.hpp"

#include <gtest/gtest.h>

using namespace epiplan;

TEST(Symbol, InterningGivesIdentity) {
  EXPECT_EQ(Symbol::intern("alpha"), Symbol::intern("alpha"));
  EXPECT_NE(Symbol::intern("alpha"), Symbol::intern("beta"));
  EXPECT_EQ(Symbol::intern("alpha").str(), "alpha");
}

TEST(Value, KindsAreDistinct) {
  EXPECT_NE(Value::integer(1), Value::boolean(true));
  EXPECT_EQ(Value::integer(3).as_int(), 3);
  EXPECT_TRUE(Value::boolean(true).as_bool());
  EXPECT_EQ(Value::symbol("x").as_symbol(), Symbol::intern("x"));
  EXPECT_THROW(Value::integer(3).as_bool(), std::logic_error);
  EXPECT_EQ(to_string(Value::integer(-4)), "-4");
  EXPECT_EQ(to_string(Value::boolean(false)), "false");
  EXPECT_EQ(to_string(Value::symbol("none")), "none");
}

TEST(Domain, RangeIndexing) {
  const Domain d = Domain::range(-2, 2);
  EXPECT_EQ(d.size(), 5u);
  EXPECT_TRUE(d.contains(Value::integer(-2)));
  EXPECT_FALSE(d.contains(Value::integer(3)));
  EXPECT_FALSE(d.contains(Value::boolean(true)));
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(*d.index_of(d.at(i)), i);
  EXPECT_EQ(d.at(0), Value::integer(-2));
}

TEST(Domain, BoolCoercesIntegerLiterals) {
  const Domain b = Domain::boolean();
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b.coerce(Value::integer(1)), Value::boolean(true));
  EXPECT_EQ(b.coerce(Value::integer(0)), Value::boolean(false));
  EXPECT_EQ(b.coerce(Value::integer(7)), Value::integer(7));
  EXPECT_EQ(Domain::range(0, 3).coerce(Value::integer(1)), Value::integer(1));
}

TEST(Domain, SetMembership) {
  const Domain s = Domain::set({Value::symbol("none"), Value::symbol("a")});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(Value::symbol("a")));
  EXPECT_FALSE(s.contains(Value::symbol("b")));
  EXPECT_EQ(s.index_of(Value::symbol("a")), 1u);
  EXPECT_EQ(s.index_of(Value::symbol("b")), std::nullopt);
}

TEST(Domain, RejectsEmptyOrDuplicate) {
  EXPECT_THROW(Domain::range(3, 2), std::invalid_argument);
  EXPECT_THROW(Domain::set({}), std::invalid_argument);
  EXPECT_THROW(Domain::set({Value::integer(1), Value::integer(1)}), std::invalid_argument);
}

namespace {

Vocabulary two_vars() {
  Vocabulary v;
  v.add_agent("a");
  v.add_var(VarDecl{"x", Domain::range(0, 3), VarKind::Fluent, NoAnchor{}, Value::integer(1)});
  v.add_var(VarDecl{"y", Domain::boolean(), VarKind::Constant, NoAnchor{}, Value::boolean(true)});
  return v;
}

}  // namespace

TEST(Vocabulary, LookupAndDuplicates) {
  Vocabulary v = two_vars();
  EXPECT_EQ(v.require_var("y").index, 1u);
  EXPECT_EQ(v.find_var("z"), std::nullopt);
  EXPECT_EQ(v.require_agent("a").index, 0u);
  EXPECT_THROW(v.require_var("z"), std::invalid_argument);
  EXPECT_THROW(v.add_agent("a"), std::invalid_argument);
  EXPECT_THROW(v.add_var(VarDecl{"x", Domain::boolean(), VarKind::Fluent, NoAnchor{}, Value::boolean(false)}),
               std::invalid_argument);
}

TEST(LocalState, RestrictIntersectUnite) {
  const State s({Value::integer(2), Value::boolean(true)});
  VarSet keep(2);
  keep.set(0);
  const LocalState only_x = restrict(s, keep);
  EXPECT_EQ(only_x.count(), 1u);
  EXPECT_EQ(*only_x.get(VarId{0}), Value::integer(2));
  EXPECT_EQ(only_x.get(VarId{1}), nullptr);

  const LocalState full = s.local();
  EXPECT_TRUE(only_x.subset_of(full));
  EXPECT_FALSE(full.subset_of(only_x));
  EXPECT_EQ(intersect(only_x, full), only_x);
  EXPECT_EQ(unite(only_x, full), full);
  EXPECT_EQ(only_x.domain(), keep);
}

TEST(LocalState, DisagreementIsAnInvariantError) {
  LocalState a(1), b(1);
  a.set(VarId{0}, Value::integer(1));
  b.set(VarId{0}, Value::integer(2));
  EXPECT_THROW(unite(a, b), InvariantError);
  EXPECT_THROW(intersect(a, b), InvariantError);
}

TEST(LocalState, EqualStatesHashEqually) {
  LocalState a(3), b(3);
  a.set(VarId{2}, Value::symbol("p"));
  b.set(VarId{2}, Value::symbol("p"));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  b.erase(VarId{2});
  EXPECT_TRUE(b.empty());
}
