#pragma once

// Second stage: comprehensive utility, the constrained choice over the
// consideration set, the unconstrained optimum, and the indecisiveness trap.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "fundchoice/consideration.hpp"
#include "fundchoice/model.hpp"

namespace fundchoice {

/// Values within this of the maximum count as ties in every argmax.
inline constexpr double kValueTieTolerance = 1e-12;

inline double comprehensive_value(const AgentSpec& agent, double x, double x_s,
                                  double future_mean) {
  if (x < 0.0 || x_s < 0.0 || future_mean < 0.0) {
    throw Error(ErrorCode::Domain, "comprehensive utility at a negative argument");
  }
  const auto& w = agent.form;
  return w.w_u * eval_utility(agent.utility, x) - w.w_1 * eval_cost(agent.c1, distance(x, x_s)) -
         w.w_2 * eval_cost(agent.c2, distance(x, future_mean));
}

/// Single-agent reading: the future reference is the mean of the agent's beliefs.
inline double comprehensive_value(const AgentSpec& agent, double x, double x_s) {
  return comprehensive_value(agent, x, x_s, expected_future_choice(agent));
}

struct ArgmaxResult {
  GridSet indices;  // full tie set, ascending
  double value = -std::numeric_limits<double>::infinity();
};

/// Argmax of f over the given grid indices; ties within kValueTieTolerance.
template <typename Objective>
ArgmaxResult grid_argmax(const GridSet& candidates, Objective&& f) {
  ArgmaxResult out;
  std::vector<double> values(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    values[c] = f(candidates[c]);
    out.value = std::max(out.value, values[c]);
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (values[c] >= out.value - kValueTieTolerance) out.indices.push_back(candidates[c]);
  }
  return out;
}

inline GridSet full_grid(const Grid& grid) {
  GridSet all(grid.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return all;
}

struct ChoiceResult {
  GridSet chosen_indices;
  std::vector<double> chosen;
  double value = 0.0;
  bool constrained = true;
  ClosedInterval interval;

  /// Canonical representative: the smallest maximizer.
  double representative() const { return chosen.front(); }
};

inline ChoiceResult second_stage_choice(const AgentSpec& agent, double x_s, const Grid& grid) {
  const double future = expected_future_choice(agent);
  const auto interval = consideration_interval(agent.utility, agent.c1, x_s);
  const auto best = grid_argmax(interval_on_grid(interval, grid), [&](std::size_t j) {
    return comprehensive_value(agent, grid.point(j), x_s, future);
  });
  return {best.indices, to_points(best.indices, grid), best.value, true, interval};
}

/// Grid argmax of U over all of [0, x_max], ignoring the consideration set.
inline ArgmaxResult unconstrained_argmax(const AgentSpec& agent, double x_s, const Grid& grid) {
  const double future = expected_future_choice(agent);
  return grid_argmax(full_grid(grid), [&](std::size_t j) {
    return comprehensive_value(agent, grid.point(j), x_s, future);
  });
}

inline double unconstrained_optimum(const AgentSpec& agent, double x_s, const Grid& grid) {
  return grid.point(unconstrained_argmax(agent, x_s, grid).indices.front());
}

struct TrapReport {
  double x_hat = 0.0;
  std::size_t x_hat_multiplicity = 1;
  ClosedInterval interval;
  double x_dagger = 0.0;  // constrained choice representative
  bool trapped = false;
  double utility_gap = 0.0;  // U(x_hat) - U(x_dagger), zero unless trapped
};

/// Trapped when the unconstrained optimum lies outside the consideration
/// interval by more than one grid step.
inline TrapReport detect_trap(const AgentSpec& agent, double x_s, const Grid& grid) {
  const auto hat = unconstrained_argmax(agent, x_s, grid);
  const auto constrained = second_stage_choice(agent, x_s, grid);
  TrapReport report;
  report.x_hat = grid.point(hat.indices.front());
  report.x_hat_multiplicity = hat.indices.size();
  report.interval = constrained.interval;
  report.x_dagger = constrained.representative();
  report.trapped = constrained.interval.gap(report.x_hat) > grid.step();
  if (report.trapped) report.utility_gap = std::max(0.0, hat.value - constrained.value);
  return report;
}

struct SequentialCriteriaCertificate {
  bool holds = false;
  GridSet gamma;
  GridSet stage1_survivors;
};

/// Rebuilds the choice as two successive maximizations on the grid menu:
/// first by strict one-many dominance, then by strict comprehensive-utility
/// comparison, and checks the result against second_stage_choice.
inline SequentialCriteriaCertificate two_criteria_certificate(const AgentSpec& agent, double x_s,
                                                              const Grid& grid) {
  SequentialCriteriaCertificate cert;
  cert.stage1_survivors = maximal_set_grid(agent.utility, agent.c1, x_s, grid);

  const double future = expected_future_choice(agent);
  std::vector<double> value(cert.stage1_survivors.size());
  for (std::size_t c = 0; c < value.size(); ++c) {
    value[c] = comprehensive_value(agent, grid.point(cert.stage1_survivors[c]), x_s, future);
  }
  // y survives the second criterion when no x beats it: U(x) > U(y).
  for (std::size_t y = 0; y < value.size(); ++y) {
    bool beaten = false;
    for (std::size_t x = 0; x < value.size() && !beaten; ++x) {
      beaten = value[x] > value[y] + kValueTieTolerance;
    }
    if (!beaten) cert.gamma.push_back(cert.stage1_survivors[y]);
  }
  const auto choice = second_stage_choice(agent, x_s, grid);
  cert.holds = !cert.gamma.empty() && cert.gamma == choice.chosen_indices;
  return cert;
}

}  // namespace fundchoice
