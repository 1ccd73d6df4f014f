#pragma once

// Model primitives: personal utility, distance costs, beliefs about the future
// social choice, the comprehensive-utility form, and the shared choice grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fundchoice/error.hpp"

namespace fundchoice {

/// Uniform discretization of [0, x_max]: points j * x_max / steps, j = 0..steps.
struct Grid {
  static constexpr std::size_t kDefaultSteps = 4000;

  double x_max = 1.0;
  std::size_t steps = kDefaultSteps;

  std::size_t size() const { return steps + 1; }
  double step() const { return x_max / static_cast<double>(steps); }
  double point(std::size_t j) const {
    return (static_cast<double>(j) * x_max) / static_cast<double>(steps);
  }

  /// Index of the grid point closest to x, clamped to the grid.
  std::size_t nearest_index(double x) const {
    if (!(x > 0.0)) return 0;
    const double scaled = x * static_cast<double>(steps) / x_max;
    if (scaled >= static_cast<double>(steps)) return steps;
    return static_cast<std::size_t>(std::llround(scaled));
  }

  double snap(double x) const { return point(nearest_index(x)); }

  /// Index of x when x sits on the grid (up to 1e-9 of a step).
  std::optional<std::size_t> exact_index(double x) const {
    if (x < 0.0 || x > x_max * (1.0 + 1e-12)) return std::nullopt;
    const std::size_t j = nearest_index(x);
    if (std::abs(point(j) - x) > 1e-9 * step()) return std::nullopt;
    return j;
  }

  std::vector<double> points() const {
    std::vector<double> out(size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = point(j);
    return out;
  }
};

/// u(x) = -a x^2 + b x + k with a > 0.
struct Quadratic {
  double a = 1.0;
  double b = 0.0;
  double k = 0.0;
};

/// Personal utility sampled on a grid; must rise strictly to a single peak and
/// fall strictly after it.
struct Tabulated {
  Grid grid;
  std::vector<double> values;
};

using UtilityFunction = std::variant<Quadratic, Tabulated>;

struct ZeroCost {};
struct LinearCost {
  double d = 0.0;
};
/// c(delta) = d * delta^p, p >= 1.
struct PowerCost {
  double d = 0.0;
  double p = 1.0;
};

using CostFunction = std::variant<ZeroCost, LinearCost, PowerCost>;

struct Atom {
  double value = 0.0;
  double probability = 1.0;
};

/// Finite-support belief about a future social choice.
struct FiniteRandomVariable {
  std::vector<Atom> atoms;

  static FiniteRandomVariable point_mass(double value) { return {{{value, 1.0}}}; }

  double mean() const {
    double m = 0.0;
    for (const auto& atom : atoms) m += atom.value * atom.probability;
    return m;
  }
};

inline double rv_mean(const FiniteRandomVariable& v) { return v.mean(); }

/// U = w_u * u(x) - w_1 * c1(|x - x_s|) - w_2 * c2(|x - mean(x_f)|).
struct ComprehensiveUtilityForm {
  double w_u = 1.0;
  double w_1 = 1.0;
  double w_2 = 1.0;
};

struct AgentSpec {
  UtilityFunction utility = Quadratic{};
  CostFunction c1 = ZeroCost{};
  CostFunction c2 = ZeroCost{};
  ComprehensiveUtilityForm form;
  // One belief per other agent (ordered by agent id, skipping self); a single
  // entry for the society in single-agent problems.
  std::vector<FiniteRandomVariable> beliefs;
};

struct MeanAggregator {};
/// Weighted mean of the other agents' choices; weights are indexed by agent
/// and renormalized over j != i.
struct WeightedAggregator {
  std::vector<double> weights;
};
using ChoiceAggregator = std::variant<MeanAggregator, WeightedAggregator>;

/// Mixture of each agent's beliefs. weights[i] are agent i's mixture weights
/// over its own belief list; an empty outer vector means uniform mixtures.
struct BeliefMixture {
  std::vector<std::vector<double>> weights;
};

struct GameSpec {
  std::vector<AgentSpec> agents;
  ChoiceAggregator choice_aggregator = MeanAggregator{};
  BeliefMixture belief_aggregator;
  double x_max = 1.0;

  std::size_t size() const { return agents.size(); }
};

// ---------------------------------------------------------------------------
// Evaluation

/// Euclidean distance on the nonnegative half-line.
inline double distance(double x, double y) {
  if (x < 0.0 || y < 0.0) throw Error(ErrorCode::Domain, "distance of a negative choice");
  return std::abs(x - y);
}

inline double eval_utility(const UtilityFunction& u, double x) {
  if (x < 0.0) throw Error(ErrorCode::Domain, "utility evaluated at negative x");
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return -f.a * x * x + f.b * x + f.k;
        } else {
          const auto j = f.grid.exact_index(x);
          if (!j || *j >= f.values.size()) {
            throw Error(ErrorCode::Lookup, "tabulated utility queried off its grid");
          }
          return f.values[*j];
        }
      },
      u);
}

inline double eval_cost(const CostFunction& c, double delta) {
  if (delta < 0.0) throw Error(ErrorCode::Domain, "cost of a negative distance");
  return std::visit(
      [delta](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroCost>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, LinearCost>) {
          return f.d * delta;
        } else {
          return delta == 0.0 ? 0.0 : f.d * std::pow(delta, f.p);
        }
      },
      c);
}

inline bool is_strictly_increasing(const CostFunction& c) {
  if (const auto* lin = std::get_if<LinearCost>(&c)) return lin->d > 0.0;
  if (const auto* pw = std::get_if<PowerCost>(&c)) return pw->d > 0.0 && pw->p >= 1.0;
  return false;
}

/// Slope of a linear-family cost (Zero counts as slope 0); nullopt for Power.
inline std::optional<double> linear_slope(const CostFunction& c) {
  if (std::holds_alternative<ZeroCost>(c)) return 0.0;
  if (const auto* lin = std::get_if<LinearCost>(&c)) return lin->d;
  return std::nullopt;
}

/// Unclamped maximizer x* of u (quadratic peak projected onto x >= 0).
inline double personal_optimum(const UtilityFunction& u) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return std::max(0.0, f.b / (2.0 * f.a));
        } else {
          const auto peak = std::max_element(f.values.begin(), f.values.end());
          return f.grid.point(static_cast<std::size_t>(peak - f.values.begin()));
        }
      },
      u);
}

inline double personal_optimum(const UtilityFunction& u, const Grid& grid) {
  return std::clamp(personal_optimum(u), 0.0, grid.x_max);
}

/// Equal-weight mixture mean of an agent's beliefs (single-agent reading).
inline double expected_future_choice(const AgentSpec& agent) {
  if (agent.beliefs.empty()) throw Error(ErrorCode::Validation, "agent has no beliefs");
  double m = 0.0;
  for (const auto& b : agent.beliefs) m += b.mean();
  return m / static_cast<double>(agent.beliefs.size());
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode {
  NonPositiveCurvature,
  NonFiniteParameter,
  TabulatedSizeMismatch,
  NotStrictlyQuasiconcave,
  NegativeCostSlope,
  PowerExponentBelowOne,
  NegativeWeight,
  EmptyBeliefs,
  ProbabilityMassNotOne,
  NonPositiveProbability,
  NegativeAtomValue,
  DuplicateAtomValue,
  EmptySupport,
  TooFewAgents,
  BeliefCountMismatch,
  AggregatorWeightsInvalid,
  NonPositiveBound,
  InvalidGrid,
};

inline std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::NonPositiveCurvature: return "NonPositiveCurvature";
    case ViolationCode::NonFiniteParameter: return "NonFiniteParameter";
    case ViolationCode::TabulatedSizeMismatch: return "TabulatedSizeMismatch";
    case ViolationCode::NotStrictlyQuasiconcave: return "NotStrictlyQuasiconcave";
    case ViolationCode::NegativeCostSlope: return "NegativeCostSlope";
    case ViolationCode::PowerExponentBelowOne: return "PowerExponentBelowOne";
    case ViolationCode::NegativeWeight: return "NegativeWeight";
    case ViolationCode::EmptyBeliefs: return "EmptyBeliefs";
    case ViolationCode::ProbabilityMassNotOne: return "ProbabilityMassNotOne";
    case ViolationCode::NonPositiveProbability: return "NonPositiveProbability";
    case ViolationCode::NegativeAtomValue: return "NegativeAtomValue";
    case ViolationCode::DuplicateAtomValue: return "DuplicateAtomValue";
    case ViolationCode::EmptySupport: return "EmptySupport";
    case ViolationCode::TooFewAgents: return "TooFewAgents";
    case ViolationCode::BeliefCountMismatch: return "BeliefCountMismatch";
    case ViolationCode::AggregatorWeightsInvalid: return "AggregatorWeightsInvalid";
    case ViolationCode::NonPositiveBound: return "NonPositiveBound";
    case ViolationCode::InvalidGrid: return "InvalidGrid";
  }
  return "Unknown";
}

struct Violation {
  ViolationCode code;
  std::string where;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

inline constexpr double kProbabilityTolerance = 1e-12;

namespace detail {

inline void append(Violations& out, const Violations& more, const std::string& prefix) {
  for (const auto& v : more) out.push_back({v.code, prefix + v.where});
}

inline bool finite(double x) { return std::isfinite(x); }

inline bool weights_are_distribution(const std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !finite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= 1e-9;
}

}  // namespace detail

inline Violations validate(const Grid& grid) {
  Violations out;
  if (!(grid.x_max > 0.0) || !detail::finite(grid.x_max)) {
    out.push_back({ViolationCode::NonPositiveBound, "x_max"});
  }
  if (grid.steps == 0) out.push_back({ViolationCode::InvalidGrid, "steps"});
  return out;
}

inline Violations validate(const UtilityFunction& u) {
  Violations out;
  std::visit(
      [&out](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          if (!detail::finite(f.a) || !detail::finite(f.b) || !detail::finite(f.k)) {
            out.push_back({ViolationCode::NonFiniteParameter, "utility"});
          } else if (!(f.a > 0.0)) {
            out.push_back({ViolationCode::NonPositiveCurvature, "utility.a"});
          }
        } else {
          detail::append(out, validate(f.grid), "utility.grid.");
          if (f.values.size() != f.grid.size()) {
            out.push_back({ViolationCode::TabulatedSizeMismatch, "utility.values"});
            return;
          }
          if (!std::all_of(f.values.begin(), f.values.end(), detail::finite)) {
            out.push_back({ViolationCode::NonFiniteParameter, "utility.values"});
            return;
          }
          // Strictly up to the peak, strictly down after it.
          std::size_t j = 1;
          while (j < f.values.size() && f.values[j] > f.values[j - 1]) ++j;
          while (j < f.values.size() && f.values[j] < f.values[j - 1]) ++j;
          if (j != f.values.size()) {
            out.push_back({ViolationCode::NotStrictlyQuasiconcave, "utility.values"});
          }
        }
      },
      u);
  return out;
}

inline Violations validate(const CostFunction& c) {
  Violations out;
  if (const auto* lin = std::get_if<LinearCost>(&c)) {
    if (!detail::finite(lin->d)) out.push_back({ViolationCode::NonFiniteParameter, "d"});
    else if (lin->d < 0.0) out.push_back({ViolationCode::NegativeCostSlope, "d"});
  } else if (const auto* pw = std::get_if<PowerCost>(&c)) {
    if (!detail::finite(pw->d) || !detail::finite(pw->p)) {
      out.push_back({ViolationCode::NonFiniteParameter, "d"});
    } else {
      if (pw->d < 0.0) out.push_back({ViolationCode::NegativeCostSlope, "d"});
      if (pw->p < 1.0) out.push_back({ViolationCode::PowerExponentBelowOne, "p"});
    }
  }
  return out;
}

inline Violations validate(const FiniteRandomVariable& v) {
  Violations out;
  if (v.atoms.empty()) {
    out.push_back({ViolationCode::EmptySupport, "atoms"});
    return out;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < v.atoms.size(); ++i) {
    const auto& atom = v.atoms[i];
    if (!detail::finite(atom.value) || !detail::finite(atom.probability)) {
      out.push_back({ViolationCode::NonFiniteParameter, "atoms"});
      return out;
    }
    if (atom.value < 0.0) out.push_back({ViolationCode::NegativeAtomValue, "atoms"});
    if (!(atom.probability > 0.0) || atom.probability > 1.0) {
      out.push_back({ViolationCode::NonPositiveProbability, "atoms"});
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (v.atoms[j].value == atom.value) {
        out.push_back({ViolationCode::DuplicateAtomValue, "atoms"});
      }
    }
    mass += atom.probability;
  }
  if (std::abs(mass - 1.0) > kProbabilityTolerance) {
    out.push_back({ViolationCode::ProbabilityMassNotOne, "atoms"});
  }
  return out;
}

inline Violations validate(const ComprehensiveUtilityForm& form) {
  Violations out;
  for (double w : {form.w_u, form.w_1, form.w_2}) {
    if (!(w >= 0.0) || !detail::finite(w)) {
      out.push_back({ViolationCode::NegativeWeight, "form"});
      break;
    }
  }
  return out;
}

/// Validates an agent on its own. expected_beliefs = n - 1 in a game; 0
/// (single-agent use) accepts any nonempty belief list.
inline Violations validate(const AgentSpec& agent, std::size_t expected_beliefs = 0) {
  Violations out;
  detail::append(out, validate(agent.utility), "");
  detail::append(out, validate(agent.c1), "c1.");
  detail::append(out, validate(agent.c2), "c2.");
  detail::append(out, validate(agent.form), "");
  if (agent.beliefs.empty()) {
    out.push_back({ViolationCode::EmptyBeliefs, "beliefs"});
  } else if (expected_beliefs != 0 && agent.beliefs.size() != expected_beliefs) {
    out.push_back({ViolationCode::BeliefCountMismatch, "beliefs"});
  }
  for (std::size_t i = 0; i < agent.beliefs.size(); ++i) {
    detail::append(out, validate(agent.beliefs[i]), "beliefs[" + std::to_string(i) + "].");
  }
  return out;
}

inline Violations validate(const GameSpec& game) {
  Violations out;
  const std::size_t n = game.size();
  if (n < 2) out.push_back({ViolationCode::TooFewAgents, "agents"});
  if (!(game.x_max > 0.0) || !detail::finite(game.x_max)) {
    out.push_back({ViolationCode::NonPositiveBound, "x_max"});
  }
  for (std::size_t i = 0; i < n; ++i) {
    detail::append(out, validate(game.agents[i], n >= 2 ? n - 1 : 0),
                   "agents[" + std::to_string(i) + "].");
  }
  if (const auto* w = std::get_if<WeightedAggregator>(&game.choice_aggregator)) {
    if (w->weights.size() != n || !detail::weights_are_distribution(w->weights)) {
      out.push_back({ViolationCode::AggregatorWeightsInvalid, "choice_aggregator"});
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j) others += j == i ? 0.0 : w->weights[j];
        if (!(others > 0.0)) {
          out.push_back({ViolationCode::AggregatorWeightsInvalid, "choice_aggregator"});
          break;
        }
      }
    }
  }
  const auto& mix = game.belief_aggregator.weights;
  if (!mix.empty()) {
    if (mix.size() != n) {
      out.push_back({ViolationCode::AggregatorWeightsInvalid, "belief_aggregator"});
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (mix[i].size() != game.agents[i].beliefs.size() ||
            !detail::weights_are_distribution(mix[i])) {
          out.push_back({ViolationCode::AggregatorWeightsInvalid,
                         "belief_aggregator[" + std::to_string(i) + "]"});
        }
      }
    }
  }
  return out;
}

template <typename T>
void require_valid(const T& spec) {
  const auto violations = validate(spec);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) {
      if (!msg.empty()) msg += ", ";
      msg += std::string(to_string(v.code)) + " at " + v.where;
    }
    throw Error(ErrorCode::Validation, msg);
  }
}

}  // namespace fundchoice
