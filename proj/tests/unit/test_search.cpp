#include "epiplan/bench.hpp"
#include "epiplan/dsl.hpp"
#include "epiplan/search.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace epiplan;
using epiplan::oracle::shortest_by_enumeration;

namespace {

Problem with_goal(Problem p, const std::string& goal) {
  p.goal = parse_formula(goal, p);
  return p;
}

std::size_t fluent_space(const Task& t) {
  std::size_t n = 1;
  for (VarId v : t.fluents()) n *= t.vocab().var(v).domain.size();
  return n;
}

constexpr const char* kMaze = R"(problem "maze"
agents a
perspective full { }
var x : 0..4 = 0
var y : 0..4 = 0
operator step(dx: -1..1, dy: -1..1) {
  pre: 0 = 0
  eff:
    x := x + dx
    y := y + dy
}
goal: x = 3 and y = 1
maintain: not (x = 1 and y = 1)
maintain: not (x = 2 and y = 1)
maintain: not (x = 2 and y = 2)
)";

}  // namespace

TEST(Bfs, ShortestPlanOnSceneGoal) {
  const Task t(build_bbl(2));
  const SearchResult r = solve(t);
  ASSERT_EQ(r.outcome, Outcome::Solved);
  EXPECT_EQ(t.format_plan(r.plan), "move(-2,-2)\nmove(-2,-2)\n");
  EXPECT_EQ(r.stats.plan_length, 2u);
}

TEST(Bfs, SocialInstances) {
  const Task sn1(build_sn(1));
  const SearchResult one = solve(sn1);
  EXPECT_EQ(one.stats.plan_length, 1u);
  EXPECT_EQ(sn1.format_plan(one.plan), "post(a,p1)\n");

  const SearchResult seven = solve(Task(build_sn(7)));
  EXPECT_EQ(seven.outcome, Outcome::Unsolvable);
  EXPECT_EQ(seven.stats.distinct_states, 216u);
  EXPECT_FALSE(seven.stats.plan_length.has_value());
}

TEST(Bfs, GroupGoalsFromTheScene) {
  for (const char* goal : {"EK[a1,a2] (vo1 = 1)", "CK[a1,a2] (vo1 = 1)"}) {
    const Task t(with_goal(build_bbl(1), goal));
    const SearchResult r = solve(t);
    ASSERT_EQ(r.outcome, Outcome::Solved) << goal;
    EXPECT_EQ(r.stats.plan_length, 2u) << goal;
  }
  const Task ek(with_goal(build_bbl(1), "EK[a1,a2] (vo1 = 1)"));
  EXPECT_TRUE(ek.validate(ek.parse_plan("move(-2,-2)\nmove(-2,-2)\n")).valid());
}

TEST(Bfs, SeeingWhetherNeedsOnlyThePose) {
  // a2 sees a1's pose from the start, so it already sees whether a1 sees o1.
  const Task t(with_goal(build_bbl(1), "S[a2] S[a1] vo1"));
  EXPECT_EQ(solve(t).stats.plan_length, 0u);
  EXPECT_TRUE(t.validate(t.parse_plan("move(-2,2)\nmove(-2,2)\n")).valid());
}

TEST(Bfs, MaintainStatesAreDeadEnds) {
  const Task t(parse_problem(kMaze));
  const SearchResult r = solve(t);
  ASSERT_EQ(r.outcome, Outcome::Solved);
  EXPECT_EQ(r.stats.plan_length, shortest_by_enumeration(t, 6));
  EXPECT_TRUE(t.validate(r.plan).valid());
}

TEST(Bfs, StatisticsInvariants) {
  for (int i : {2, 4, 11}) {
    const Task t(build_sn(i));
    const SearchResult r = solve(t);
    EXPECT_LE(r.stats.expanded, r.stats.generated);
    EXPECT_LE(r.stats.distinct_states, r.stats.generated);
    EXPECT_LE(r.stats.distinct_states, fluent_space(t));
    EXPECT_GT(r.stats.external_calls, 0u);
  }
}

TEST(Bfs, MatchesEnumerationOracle) {
  for (int i : {1, 2, 3, 4, 5, 6, 8, 9}) {
    const Task t(build_sn(i));
    const SearchResult r = solve(t);
    ASSERT_EQ(r.outcome, Outcome::Solved);
    EXPECT_EQ(r.stats.plan_length, shortest_by_enumeration(t, 3)) << "SN" << i;
  }
}

TEST(Novelty, ReturnsValidPlans) {
  for (int width : {1, 2}) {
    SearchConfig cfg{Algorithm::Novelty, width, std::nullopt, std::nullopt};
    for (int i : {1, 4, 8, 14}) {
      const Task t(build_sn(i));
      const SearchResult r = solve(t, cfg);
      if (r.outcome == Outcome::Solved) EXPECT_TRUE(t.validate(r.plan).valid());
      EXPECT_NE(r.outcome, Outcome::Unsolvable);
    }
  }
}

TEST(Novelty, WidthTwoReachesTheCorridorGoal) {
  // Walking back after sensing repeats single atoms, so width 1 prunes the only plan.
  const Task corridor(gen_corridor(3, 4, 1, 2));
  EXPECT_EQ(solve(corridor, SearchConfig{Algorithm::Novelty, 1, std::nullopt, std::nullopt}).outcome,
            Outcome::PrunedExhausted);
  const SearchResult r = solve(corridor, SearchConfig{Algorithm::Novelty, 2, std::nullopt, std::nullopt});
  ASSERT_EQ(r.outcome, Outcome::Solved);
  EXPECT_TRUE(corridor.validate(r.plan).valid());
}

TEST(Novelty, ExhaustionIsNotUnsolvability) {
  const SearchResult r = solve(Task(build_sn(7)), SearchConfig{Algorithm::Novelty, 1, std::nullopt, std::nullopt});
  EXPECT_EQ(r.outcome, Outcome::PrunedExhausted);
}

TEST(Limits, NodeCapStopsSearch) {
  const SearchResult r = solve(Task(build_bbl(3)), SearchConfig{Algorithm::Bfs, 1, 1000, std::nullopt});
  EXPECT_EQ(r.outcome, Outcome::ResourceLimit);
  EXPECT_LE(r.stats.generated, 1001u);
}

TEST(Limits, TimeCapStopsSearch) {
  const SearchResult r = solve(Task(build_bbl(3)), SearchConfig{Algorithm::Bfs, 1, std::nullopt, 0.05});
  EXPECT_EQ(r.outcome, Outcome::ResourceLimit);
  EXPECT_LT(r.stats.elapsed, 5.0);
}

TEST(Limits, InvalidConfiguration) {
  const Task t(build_sn(1));
  EXPECT_THROW(solve(t, SearchConfig{Algorithm::Novelty, 3, std::nullopt, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(solve(t, SearchConfig{Algorithm::Bfs, 1, 0, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(solve(t, SearchConfig{Algorithm::Bfs, 1, std::nullopt, -1.0}), std::invalid_argument);
}

TEST(Outcomes, Names) {
  EXPECT_EQ(to_string(Outcome::Solved), "SOLVED");
  EXPECT_EQ(to_string(Outcome::Unsolvable), "UNSOLVABLE");
  EXPECT_EQ(to_string(Outcome::PrunedExhausted), "PRUNED_EXHAUSTED");
  EXPECT_EQ(to_string(Outcome::ResourceLimit), "RESOURCE_LIMIT");
}
