#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"

namespace fundchoice {
namespace {

using testing::conformist;

bool has_code(const Violations& vs, ViolationCode code) {
  return std::any_of(vs.begin(), vs.end(), [code](const Violation& v) { return v.code == code; });
}

TEST(Grid, PointsIncludeBothEnds) {
  const Grid grid{10.0, 100};
  EXPECT_EQ(grid.size(), 101u);
  EXPECT_EQ(grid.point(0), 0.0);
  EXPECT_EQ(grid.point(100), 10.0);
  EXPECT_DOUBLE_EQ(grid.step(), 0.1);
}

TEST(Grid, SnapAndExactIndex) {
  const Grid grid{8.0, 800};
  EXPECT_EQ(grid.nearest_index(3.754), 375u);
  EXPECT_EQ(grid.nearest_index(-1.0), 0u);
  EXPECT_EQ(grid.nearest_index(100.0), 800u);
  EXPECT_EQ(grid.exact_index(3.75), std::optional<std::size_t>(375));
  EXPECT_FALSE(grid.exact_index(3.755).has_value());
}

TEST(EvalUtility, QuadraticValues) {
  const UtilityFunction u = Quadratic{2, 4, 5};
  EXPECT_EQ(eval_utility(u, 0.0), 5.0);
  EXPECT_EQ(eval_utility(u, 1.0), 7.0);
  EXPECT_EQ(eval_utility(u, 2.0), 5.0);
}

TEST(EvalUtility, NegativeChoiceIsDomainError) {
  try {
    eval_utility(Quadratic{2, 4, 5}, -0.5);
    FAIL() << "expected a domain error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Domain);
  }
}

TEST(EvalUtility, TabulatedOffGridIsLookupError) {
  const Grid grid{10.0, 100};
  Tabulated t{grid, {}};
  for (double x : grid.points()) t.values.push_back(-(x - 3.0) * (x - 3.0));
  EXPECT_DOUBLE_EQ(eval_utility(t, 2.0), -1.0);
  try {
    eval_utility(t, 2.05);
    FAIL() << "expected a lookup error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Lookup);
  }
}

TEST(PersonalOptimum, Quadratic) {
  EXPECT_EQ(personal_optimum(Quadratic{2, 4, 5}), 1.0);
  EXPECT_EQ(personal_optimum(Quadratic{1, 0, 0}), 0.0);
  EXPECT_EQ(personal_optimum(Quadratic{1, 30, 0}, Grid{10.0, 10}), 10.0);
}

TEST(PersonalOptimum, TabulatedPeakMatchesGridArgmax) {
  const Grid grid{10.0, 100};
  Tabulated t{grid, {}};
  for (double x : grid.points()) t.values.push_back(-(x - 3.0) * (x - 3.0));
  std::size_t best = 0;
  for (std::size_t j = 1; j < t.values.size(); ++j) {
    if (t.values[j] > t.values[best]) best = j;
  }
  EXPECT_DOUBLE_EQ(personal_optimum(t), grid.point(best));
  EXPECT_NEAR(personal_optimum(t), 3.0, 1e-12);
}

TEST(RvMean, Examples) {
  EXPECT_EQ(rv_mean(FiniteRandomVariable::point_mass(10.0)), 10.0);
  EXPECT_EQ(rv_mean(FiniteRandomVariable::point_mass(0.0)), 0.0);
  EXPECT_DOUBLE_EQ(rv_mean(FiniteRandomVariable{{{2.0, 0.5}, {6.0, 0.5}}}), 4.0);
}

TEST(Costs, ZeroAtZeroAndMonotone) {
  const std::vector<CostFunction> costs{ZeroCost{}, LinearCost{3.0}, PowerCost{2.0, 1.5}};
  for (const auto& c : costs) {
    EXPECT_EQ(eval_cost(c, 0.0), 0.0);
    double previous = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double v = eval_cost(c, 0.1 * j);
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
  EXPECT_DOUBLE_EQ(eval_cost(PowerCost{2.0, 2.0}, 3.0), 18.0);
}

TEST(Distance, SymmetricAndRejectsNegatives) {
  EXPECT_EQ(distance(1.5, 4.0), distance(4.0, 1.5));
  EXPECT_EQ(distance(2.0, 2.0), 0.0);
  EXPECT_THROW(distance(-1.0, 2.0), Error);
}

TEST(Validate, WellFormedAgentHasNoViolations) {
  EXPECT_TRUE(validate(conformist(2, 4, 5, 7, 4, 10)).empty());
}

TEST(Validate, NonPositiveCurvature) {
  auto agent = conformist(2, 4, 5, 7, 4, 10);
  agent.utility = Quadratic{0, 4, 5};
  const auto vs = validate(agent);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].code, ViolationCode::NonPositiveCurvature);
}

TEST(Validate, ProbabilityMassNotOne) {
  const FiniteRandomVariable v{{{1.0, 0.4}, {2.0, 0.5}}};
  const auto vs = validate(v);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].code, ViolationCode::ProbabilityMassNotOne);
}

TEST(Validate, CollectsEveryViolation) {
  AgentSpec agent;
  agent.utility = Quadratic{-1, 0, 0};
  agent.c1 = LinearCost{-2};
  agent.c2 = PowerCost{1, 0.5};
  agent.form = {1, -1, 1};
  const auto vs = validate(agent);
  EXPECT_TRUE(has_code(vs, ViolationCode::NonPositiveCurvature));
  EXPECT_TRUE(has_code(vs, ViolationCode::NegativeCostSlope));
  EXPECT_TRUE(has_code(vs, ViolationCode::PowerExponentBelowOne));
  EXPECT_TRUE(has_code(vs, ViolationCode::NegativeWeight));
  EXPECT_TRUE(has_code(vs, ViolationCode::EmptyBeliefs));
}

TEST(Validate, TabulatedMustBeSinglePeaked) {
  const Grid grid{4.0, 4};
  EXPECT_TRUE(validate(UtilityFunction{Tabulated{grid, {0, 1, 2, 1, 0}}}).empty());
  EXPECT_TRUE(has_code(validate(UtilityFunction{Tabulated{grid, {0, 1, 1, 1, 0}}}),
                       ViolationCode::NotStrictlyQuasiconcave));
  EXPECT_TRUE(has_code(validate(UtilityFunction{Tabulated{grid, {0, 1, 0, 1, 0}}}),
                       ViolationCode::NotStrictlyQuasiconcave));
  EXPECT_TRUE(has_code(validate(UtilityFunction{Tabulated{grid, {0, 1}}}),
                       ViolationCode::TabulatedSizeMismatch));
}

TEST(Validate, GameChecksBeliefCountsAndWeights) {
  auto game = testing::extreme_belief_game();
  EXPECT_TRUE(validate(game).empty());

  game.agents[0].beliefs.push_back(FiniteRandomVariable::point_mass(1.0));
  EXPECT_TRUE(has_code(validate(game), ViolationCode::BeliefCountMismatch));

  game = testing::extreme_belief_game();
  game.choice_aggregator = WeightedAggregator{{0.3, 0.3}};
  EXPECT_TRUE(has_code(validate(game), ViolationCode::AggregatorWeightsInvalid));

  game.agents.pop_back();
  game.choice_aggregator = MeanAggregator{};
  EXPECT_TRUE(has_code(validate(game), ViolationCode::TooFewAgents));
}

TEST(Validate, RequireValidThrowsValidation) {
  auto agent = conformist(2, 4, 5, 7, 4, 10);
  agent.beliefs.clear();
  try {
    require_valid(agent);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Validation);
  }
}

TEST(ExpectedFutureChoice, AveragesBeliefMeans) {
  auto agent = conformist(2, 4, 5, 1, 1, 10);
  EXPECT_EQ(expected_future_choice(agent), 10.0);
  agent.beliefs.push_back(FiniteRandomVariable{{{2.0, 0.5}, {6.0, 0.5}}});
  EXPECT_DOUBLE_EQ(expected_future_choice(agent), 7.0);
}

}  // namespace
}  // namespace fundchoice
