#include "epiplan/formula.hpp"

#include <gtest/gtest.h>

using namespace epiplan;

namespace {

struct Fixture {
  Vocabulary vocab;
  AgentId a, b, c;
  VarId x, y;

  Fixture() {
    a = vocab.add_agent("a");
    b = vocab.add_agent("b");
    c = vocab.add_agent("c");
    x = vocab.add_var(VarDecl{"x", Domain::range(0, 3), VarKind::Fluent, NoAnchor{}, Value::integer(0)});
    y = vocab.add_var(VarDecl{"y", Domain::boolean(), VarKind::Fluent, NoAnchor{}, Value::boolean(false)});
  }
};

}  // namespace

TEST(Formula, StructuralEquality) {
  Fixture f;
  EXPECT_EQ(knows(f.a, eq(f.x, Value::integer(1))), knows(f.a, eq(f.x, Value::integer(1))));
  EXPECT_NE(knows(f.a, eq(f.x, Value::integer(1))), knows(f.b, eq(f.x, Value::integer(1))));
}

TEST(Formula, GroupAgentsAreSortedAndUnique) {
  Fixture f;
  const Formula g = group_knows(GroupMode::Common, {f.c, f.a, f.c}, eq(f.x, Value::integer(0)));
  const auto& node = std::get<GroupKnows>(g.node);
  EXPECT_EQ(node.agents, (std::vector<AgentId>{f.a, f.c}));
  EXPECT_THROW(validate(group_knows(GroupMode::Everyone, {}, eq(f.x, f.x)), f.vocab, RelationRegistry::builtins()),
               std::invalid_argument);
}

TEST(Formula, DepthVarsAndConjuncts) {
  Fixture f;
  const Formula atom = eq(f.x, Value::integer(1));
  const Formula nested = knows(f.a, knows(f.b, atom));
  EXPECT_EQ(modal_depth(atom), 0);
  EXPECT_EQ(modal_depth(nested), 2);
  EXPECT_EQ(modal_depth(negate(group_knows(GroupMode::Distributed, {f.a, f.b}, nested))), 3);
  EXPECT_EQ(modal_depth(sees(f.a, f.y)), 1);
  EXPECT_FALSE(is_epistemic(atom));
  EXPECT_TRUE(is_epistemic(nested));
  EXPECT_TRUE(has_epistemic(conj(atom, negate(sees(f.a, f.y)))));
  EXPECT_FALSE(has_epistemic(conj(atom, negate(atom))));

  const VarSet vs = vars_of(conj(atom, sees(f.b, f.y)), f.vocab.num_vars());
  EXPECT_TRUE(vs.test(f.x.index));
  EXPECT_TRUE(vs.test(f.y.index));

  const Formula three = conj(conj(atom, nested), negate(atom));
  ASSERT_EQ(conjuncts(three).size(), 3u);
  EXPECT_EQ(conjuncts(three)[1], nested);
  EXPECT_EQ(conjuncts(atom).size(), 1u);
}

TEST(Formula, ParameterSubstitution) {
  Fixture f;
  const Formula schema = eq(f.x, ParamRef{0});
  EXPECT_TRUE(has_params(schema));
  const std::vector<Value> args = {Value::integer(2)};
  const Formula ground = substitute(schema, args);
  EXPECT_FALSE(has_params(ground));
  EXPECT_EQ(ground, eq(f.x, Value::integer(2)));
}

TEST(Relations, BuiltinsAndErrors) {
  const RelationRegistry r = RelationRegistry::builtins();
  const std::vector<Value> one_two = {Value::integer(1), Value::integer(2)};
  EXPECT_TRUE(r.holds("<", one_two));
  EXPECT_TRUE(r.holds("<=", one_two));
  EXPECT_FALSE(r.holds(">=", one_two));
  EXPECT_TRUE(r.holds("!=", one_two));
  const std::vector<Value> syms = {Value::symbol("p"), Value::symbol("p")};
  EXPECT_TRUE(r.holds("=", syms));
  EXPECT_THROW(r.holds("<", syms), RelationError);
  EXPECT_THROW(r.holds("nope", one_two), RelationError);
  EXPECT_THROW(r.check("=", 3), RelationError);

  // far_away(x1, y1, x2, y2, dx, dy): the points differ by more than dx or dy.
  const std::vector<Value> far = {Value::integer(0), Value::integer(0), Value::integer(5),
                                  Value::integer(0), Value::integer(3), Value::integer(3)};
  const std::vector<Value> near = {Value::integer(0), Value::integer(0), Value::integer(2),
                                   Value::integer(1), Value::integer(3), Value::integer(3)};
  EXPECT_TRUE(r.holds("far_away", far));
  EXPECT_FALSE(r.holds("far_away", near));
}

TEST(Relations, CustomRelation) {
  RelationRegistry r = RelationRegistry::builtins();
  r.add("even", Relation{1, [](std::span<const Value> v) { return v[0].as_int() % 2 == 0; }});
  const std::vector<Value> four = {Value::integer(4)};
  EXPECT_TRUE(r.holds("even", four));
  EXPECT_THROW(r.add("even", Relation{1, [](std::span<const Value>) { return true; }}), RelationError);
  EXPECT_THROW(r.add("odd", Relation{1, nullptr}), RelationError);
}

TEST(Formula, ValidateRejectsBadReferences) {
  Fixture f;
  const RelationRegistry r = RelationRegistry::builtins();
  EXPECT_NO_THROW(validate(knows(f.a, eq(f.x, Value::integer(1))), f.vocab, r));
  EXPECT_THROW(validate(knows(AgentId{7}, eq(f.x, Value::integer(1))), f.vocab, r), std::invalid_argument);
  EXPECT_THROW(validate(eq(VarId{9}, Value::integer(1)), f.vocab, r), std::invalid_argument);
  EXPECT_THROW(validate(rel("unknown", {f.x}), f.vocab, r), std::invalid_argument);
  EXPECT_THROW(validate(eq(f.x, ParamRef{0}), f.vocab, r), std::invalid_argument);
  EXPECT_NO_THROW(validate(eq(f.x, ParamRef{0}), f.vocab, r, 1));
}

TEST(Formula, PrintsSurfaceSyntax) {
  Fixture f;
  const Formula g = conj(knows(f.a, eq(f.x, Value::integer(1))),
                         negate(group_sees(GroupMode::Common, {f.a, f.b}, f.y)));
  EXPECT_EQ(to_string(g, f.vocab), "(K[a] (x = 1)) and (not (CS[a,b] y))");
  const std::vector<std::string> params = {"d"};
  EXPECT_EQ(to_string(eq(f.x, ParamRef{0}), f.vocab, params), "x = d");
}
