#include "epiplan/bench.hpp"
#include "epiplan/dsl.hpp"
#include "epiplan/planning.hpp"

#include <gtest/gtest.h>

using namespace epiplan;

namespace {

constexpr const char* kCounter = R"(problem "counter"
agents a
perspective full { }
var n : 0..3 = 0
var flag : bool = false
const limit : 0..3 = 2
operator inc(k: 1..2) {
  pre: n < limit
  eff:
    n := n + k
}
operator mark() {
  pre: n = limit
  eff:
    flag := true
    when n = 2 then n := 0
}
goal: flag = true
maintain: n <= 2
)";

Plan plan_of(const Task& t, std::initializer_list<const char*> labels) {
  Plan p;
  for (const char* l : labels) {
    auto i = t.find_action(l);
    if (!i) throw std::invalid_argument(std::string("no action ") + l);
    p.steps.push_back(*i);
  }
  return p;
}

}  // namespace

TEST(Grounding, LabelsAndOrder) {
  const Task t(build_bbl(1));
  ASSERT_EQ(t.actions().size(), 25u + 91u);
  EXPECT_EQ(t.actions().front().label, "move(-2,-2)");
  EXPECT_EQ(t.actions()[1].label, "move(-2,-1)");
  EXPECT_EQ(t.actions()[25].label, "turn(-45)");
  EXPECT_EQ(t.actions().back().label, "turn(45)");
  EXPECT_TRUE(t.find_action("turn(0)").has_value());
  EXPECT_FALSE(t.find_action("turn(46)").has_value());
}

TEST(Grounding, ParameterlessLabels) {
  const Task t(parse_problem(kCounter));
  EXPECT_TRUE(t.find_action("mark").has_value());
  EXPECT_TRUE(t.find_action("mark()").has_value());
  EXPECT_EQ(t.actions().size(), 3u);
}

TEST(Applicability, OutOfDomainEffectBlocksAction) {
  const Task t(build_bbl(1));
  State s = t.initial();
  s.set(t.vocab().require_var("a1_dir"), Value::integer(170));
  EXPECT_FALSE(t.applicable(t.actions()[*t.find_action("turn(20)")], s));
  EXPECT_TRUE(t.applicable(t.actions()[*t.find_action("turn(10)")], s));
  EXPECT_THROW(t.apply(t.actions()[*t.find_action("turn(20)")], s), std::logic_error);
}

TEST(Applicability, ConditionalEffectsReadTheOldState) {
  const Task t(parse_problem(kCounter));
  State s = t.apply(t.actions()[*t.find_action("inc(2)")], t.initial());
  EXPECT_EQ(s[t.vocab().require_var("n")], Value::integer(2));
  EXPECT_FALSE(t.applicable(t.actions()[*t.find_action("inc(1)")], s));
  s = t.apply(t.actions()[*t.find_action("mark")], s);
  EXPECT_EQ(s[t.vocab().require_var("n")], Value::integer(0));
  EXPECT_EQ(s[t.vocab().require_var("flag")], Value::boolean(true));
}

TEST(Applicability, SocialPostWritesOnlyTheChosenMessage) {
  const Task t(build_sn(1));
  const State s = t.apply(t.actions()[*t.find_action("post(c,p2)")], t.initial());
  EXPECT_EQ(s[t.vocab().require_var("post_p2")], Value::symbol("c"));
  EXPECT_EQ(s[t.vocab().require_var("post_p1")], Value::symbol("none"));
}

TEST(Validation, Verdicts) {
  const Task t(parse_problem(kCounter));
  EXPECT_TRUE(t.validate(plan_of(t, {"inc(2)", "mark"})).valid());
  EXPECT_TRUE(t.validate(plan_of(t, {"inc(1)", "inc(1)", "mark"})).valid());

  const Verdict unmet = t.validate(Plan{});
  EXPECT_EQ(unmet.kind, Verdict::Kind::GoalUnmet);
  EXPECT_EQ(unmet.describe(), "goal unmet");

  const Verdict blocked = t.validate(plan_of(t, {"inc(2)", "inc(1)"}));
  EXPECT_EQ(blocked.kind, Verdict::Kind::Inapplicable);
  EXPECT_EQ(blocked.describe(), "step 2 inapplicable");

  const Verdict broken = t.validate(plan_of(t, {"inc(1)", "inc(2)", "mark"}));
  EXPECT_EQ(broken.kind, Verdict::Kind::MaintainViolated);
  EXPECT_EQ(broken.describe(), "maintain violated at state 2");
  EXPECT_EQ(Verdict{}.describe(), "valid");
}

TEST(Validation, KnownPlansForSceneGoals) {
  const Task eleven(build_bbl(11));
  EXPECT_TRUE(eleven
                  .validate(plan_of(eleven, {"move(-2,1)", "move(-2,2)", "move(-1,2)", "move(0,2)", "move(0,2)",
                                             "move(0,2)", "turn(-45)", "turn(-44)"}))
                  .valid());
  const Task twelve(build_bbl(12));
  EXPECT_TRUE(twelve
                  .validate(plan_of(twelve, {"turn(-44)", "turn(-45)", "turn(-45)", "move(1,2)", "move(2,2)",
                                             "move(2,2)", "move(2,2)", "move(2,2)", "move(2,2)", "move(-1,2)"}))
                  .valid());
  const Task sn14(build_sn(14));
  EXPECT_TRUE(sn14.validate(plan_of(sn14, {"post(e,p1)", "post(e,p2)", "post(e,p3)"})).valid());
  const Task sn9(build_sn(9));
  EXPECT_TRUE(sn9.validate(plan_of(sn9, {"post(a,p1)", "post(a,p2)", "post(c,p3)"})).valid());
  EXPECT_FALSE(sn9.validate(plan_of(sn9, {"post(b,p1)", "post(b,p2)", "post(b,p3)"})).valid());
}

TEST(PlanText, RoundTrip) {
  const Task t(build_bbl(2));
  const Plan p = plan_of(t, {"move(-2,-2)", "turn(5)"});
  EXPECT_EQ(t.format_plan(p), "move(-2,-2)\nturn(5)\n");
  EXPECT_EQ(t.parse_plan(t.format_plan(p)), p);
  EXPECT_EQ(t.parse_plan("# comment\n\n move(-2, -2)\nturn(5)  # trailing\n"), p);
  EXPECT_THROW(t.parse_plan("fly(1)\n"), std::invalid_argument);
}

TEST(ProblemChecks, RejectsWritesToConstants) {
  Problem p = parse_problem(kCounter);
  p.operators[0].effects[0].target = p.vocab.require_var("limit");
  EXPECT_THROW(check_problem(p, RelationRegistry::builtins()), ProblemError);
}

TEST(ProblemChecks, RejectsOutOfDomainInitialValue) {
  Problem p = parse_problem(kCounter);
  Vocabulary v;
  v.add_agent("a");
  for (VarDecl d : p.vocab.vars()) {
    if (d.name == "n") d.initial = Value::integer(9);
    v.add_var(d);
  }
  p.vocab = v;
  EXPECT_THROW(check_problem(p, RelationRegistry::builtins()), ProblemError);
}

TEST(Expressions, SignedSums) {
  const Task t(parse_problem(kCounter));
  const VarId n = t.vocab().require_var("n");
  State s = t.initial();
  s.set(n, Value::integer(3));
  const Expr e{{{false, n}, {true, Value::integer(1)}, {false, ParamRef{0}}}};
  const std::vector<Value> args = {Value::integer(5)};
  EXPECT_EQ(evaluate(e, s, args), Value::integer(7));
  EXPECT_EQ(evaluate(Expr{{{false, Value::symbol("p")}}}, s), Value::symbol("p"));
  EXPECT_EQ(evaluate(Expr{{{true, n}}}, s), Value::integer(-3));
}

TEST(TaskSetup, FluentsExcludeConstants) {
  const Task t(build_bbl(1));
  EXPECT_EQ(t.fluents().size(), 3u);
  EXPECT_TRUE(t.goal(t.initial()));
  EXPECT_TRUE(t.maintained(t.initial()));
}
