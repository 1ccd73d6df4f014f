#pragma once

// Shared builders and brute-force oracles. The oracles evaluate the model
// formulas directly and never call the library's evaluation functions.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fundchoice/fundchoice.hpp"

namespace fundchoice::testing {

inline AgentSpec conformist(double a, double b, double k, double d1, double d2, double belief) {
  AgentSpec agent;
  agent.utility = Quadratic{a, b, k};
  agent.c1 = d1 > 0.0 ? CostFunction{LinearCost{d1}} : CostFunction{ZeroCost{}};
  agent.c2 = d2 > 0.0 ? CostFunction{LinearCost{d2}} : CostFunction{ZeroCost{}};
  agent.beliefs = {FiniteRandomVariable::point_mass(belief)};
  return agent;
}

inline GameSpec two_agent_game(AgentSpec first, AgentSpec second, double x_max) {
  GameSpec game;
  game.agents = {std::move(first), std::move(second)};
  game.x_max = x_max;
  return game;
}

/// a=2, b=4, k=5, c1 = 4|.|, no future cost.
inline GameSpec akerlof_game() {
  return two_agent_game(conformist(2, 4, 5, 4, 0, 0), conformist(2, 4, 5, 4, 0, 0), 8.0);
}

/// a=2, b=4, k=5, c2 = 4|.| toward 10, c1 weights 7 and 16.
inline GameSpec extreme_belief_game() {
  return two_agent_game(conformist(2, 4, 5, 7, 4, 10), conformist(2, 4, 5, 16, 4, 10), 40.0);
}

// --- direct formulas --------------------------------------------------------

inline double quad(double a, double b, double k, double x) { return -a * x * x + b * x + k; }

/// -a x^2 + b x + k - w1 d1 |x - s| - w2 d2 |x - f|.
struct LinearAgent {
  double a, b, k, d1, d2, f;
  double w_u = 1.0, w_1 = 1.0, w_2 = 1.0;

  double value(double x, double s) const {
    return w_u * quad(a, b, k, x) - w_1 * d1 * std::abs(x - s) - w_2 * d2 * std::abs(x - f);
  }

  AgentSpec spec() const {
    AgentSpec agent = conformist(a, b, k, d1, d2, f);
    agent.form = {w_u, w_1, w_2};
    return agent;
  }
};

/// Grid points x with x = j * x_max / steps.
inline double grid_point(double x_max, std::size_t steps, std::size_t j) {
  return static_cast<double>(j) * x_max / static_cast<double>(steps);
}

// --- random draws -----------------------------------------------------------

class Draws {
 public:
  explicit Draws(std::uint32_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  /// Uniform on (0, hi].
  double positive(double hi) { return hi - uniform(0.0, hi); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937 rng_;
};

/// Draw ranges shared by the property tests and the acceptance suite:
/// a in [0.5, 5], b in [0, 20], k in [-5, 5], d1 in (0, 10], x_s in [0, 10],
/// d2 in (0, 10], belief in [0, 20].
inline LinearAgent draw_agent(Draws& draws, bool with_future_cost) {
  LinearAgent agent{draws.uniform(0.5, 5.0), draws.uniform(0.0, 20.0), draws.uniform(-5.0, 5.0),
                    draws.positive(10.0), 0.0, 0.0};
  if (with_future_cost) {
    agent.d2 = draws.positive(10.0);
    agent.f = draws.uniform(0.0, 20.0);
  }
  return agent;
}

}  // namespace fundchoice::testing
