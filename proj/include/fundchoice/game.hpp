#pragma once

// n-agent layer: aggregation of choices and beliefs, payoffs, best responses,
// and the search for equilibria with and without deferral.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "fundchoice/choice.hpp"
#include "fundchoice/consideration.hpp"
#include "fundchoice/model.hpp"
#include "fundchoice/parallel.hpp"

namespace fundchoice {

struct StrategyProfile {
  std::vector<double> choices;

  std::size_t size() const { return choices.size(); }
  double operator[](std::size_t i) const { return choices[i]; }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
  friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;
};

enum class EquilibriumKind { Standard, AfterDeferral, Both };

inline std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Standard: return "Standard";
    case EquilibriumKind::AfterDeferral: return "AfterDeferral";
    case EquilibriumKind::Both: return "Both";
  }
  return "Unknown";
}

inline bool is_standard(EquilibriumKind kind) { return kind != EquilibriumKind::AfterDeferral; }
inline bool is_after_deferral(EquilibriumKind kind) { return kind != EquilibriumKind::Standard; }

struct EquilibriumCertificate {
  StrategyProfile profile;
  EquilibriumKind kind = EquilibriumKind::Standard;
  double max_regret = 0.0;
  std::vector<ClosedInterval> per_agent_consideration;
};

// ---------------------------------------------------------------------------
// Aggregation and payoffs

namespace detail {

inline void check_agent_index(const GameSpec& game, std::size_t i) {
  if (game.size() < 2) throw Error(ErrorCode::Configuration, "a game needs at least two agents");
  if (i >= game.size()) throw Error(ErrorCode::Configuration, "agent index out of range");
}

inline void check_profile(const GameSpec& game, const StrategyProfile& profile) {
  if (profile.size() != game.size()) {
    throw Error(ErrorCode::Configuration, "profile length does not match the agent count");
  }
  for (double x : profile.choices) {
    if (x < 0.0) throw Error(ErrorCode::Domain, "negative choice in profile");
  }
}

}  // namespace detail

/// Social reference point g_i(x_{-i}).
inline double aggregate_choices(const GameSpec& game, std::size_t i, const StrategyProfile& profile) {
  detail::check_agent_index(game, i);
  detail::check_profile(game, profile);
  const std::size_t n = game.size();
  if (n == 2) return profile[1 - i];
  if (const auto* w = std::get_if<WeightedAggregator>(&game.choice_aggregator)) {
    if (w->weights.size() != n) {
      throw Error(ErrorCode::Configuration, "weighted aggregator needs one weight per agent");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      num += w->weights[j] * profile[j];
      den += w->weights[j];
    }
    if (!(den > 0.0)) throw Error(ErrorCode::Configuration, "aggregator weights vanish off agent");
    return num / den;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) sum += profile[j];
  }
  return sum / static_cast<double>(n - 1);
}

/// Agent i's mixed belief h_i about the future aggregate; atoms merged by value
/// and sorted ascending.
inline FiniteRandomVariable aggregate_beliefs(const GameSpec& game, std::size_t i) {
  if (i >= game.size()) throw Error(ErrorCode::Configuration, "agent index out of range");
  const auto& beliefs = game.agents[i].beliefs;
  if (beliefs.empty()) throw Error(ErrorCode::Configuration, "agent has no beliefs");
  std::vector<double> weights;
  if (game.belief_aggregator.weights.empty()) {
    weights.assign(beliefs.size(), 1.0 / static_cast<double>(beliefs.size()));
  } else {
    if (game.belief_aggregator.weights.size() != game.size() ||
        game.belief_aggregator.weights[i].size() != beliefs.size()) {
      throw Error(ErrorCode::Configuration, "mixture weights do not match the belief list");
    }
    weights = game.belief_aggregator.weights[i];
  }
  std::map<double, double> mass;
  for (std::size_t b = 0; b < beliefs.size(); ++b) {
    for (const auto& atom : beliefs[b].atoms) mass[atom.value] += weights[b] * atom.probability;
  }
  FiniteRandomVariable out;
  for (const auto& [value, p] : mass) {
    if (p > 0.0) out.atoms.push_back({value, p});
  }
  return out;
}

/// Agent i's payoff as a function of its own choice, with the opponents fixed.
class PayoffSlice {
 public:
  PayoffSlice(const GameSpec& game, std::size_t i, const StrategyProfile& profile)
      : agent_(&game.agents.at(i)),
        reference_(aggregate_choices(game, i, profile)),
        future_(aggregate_beliefs(game, i).mean()) {}

  PayoffSlice(const AgentSpec& agent, double reference, double future)
      : agent_(&agent), reference_(reference), future_(future) {}

  double operator()(double x) const { return comprehensive_value(*agent_, x, reference_, future_); }

  const AgentSpec& agent() const { return *agent_; }
  double reference() const { return reference_; }
  double future() const { return future_; }

  ClosedInterval consideration() const {
    return consideration_interval(agent_->utility, agent_->c1, reference_);
  }

 private:
  const AgentSpec* agent_;
  double reference_;
  double future_;
};

inline double payoff(const GameSpec& game, std::size_t i, const StrategyProfile& profile) {
  return PayoffSlice(game, i, profile)(profile[i]);
}

// ---------------------------------------------------------------------------
// Exact solver for concave quadratic minus weighted absolute values

struct Kink {
  double location = 0.0;
  double weight = 0.0;
};

struct KinkedArgmax {
  ClosedInterval argmax;
  double value = 0.0;
};

/// Maximizes -a x^2 + b x + k - sum_j w_j |x - p_j| over [lo, hi]. The
/// objective is strictly concave, so the maximizer is unique: it is the
/// clamped stationary point of the linear-slope segment that contains it.
inline KinkedArgmax kinked_concave_argmax(const Quadratic& quad, std::span<const Kink> kinks,
                                          double lo = 0.0,
                                          double hi = std::numeric_limits<double>::infinity()) {
  if (!(quad.a > 0.0)) throw Error(ErrorCode::PreconditionViolated, "curvature must be positive");
  if (!(lo <= hi)) throw Error(ErrorCode::PreconditionViolated, "empty domain");
  for (const auto& kink : kinks) {
    if (!(kink.weight >= 0.0)) {
      throw Error(ErrorCode::PreconditionViolated, "kink weights must be nonnegative");
    }
  }
  const auto objective = [&](double x) {
    double v = -quad.a * x * x + quad.b * x + quad.k;
    for (const auto& kink : kinks) v -= kink.weight * std::abs(x - kink.location);
    return v;
  };

  std::vector<double> breaks{lo};
  for (const auto& kink : kinks) {
    if (kink.location > lo && kink.location < hi) breaks.push_back(kink.location);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(hi);

  double best_x = lo;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double left = breaks[s];
    const double right = breaks[s + 1];
    // Net pull of the kinks on the open segment (left, right).
    double pull = 0.0;
    for (const auto& kink : kinks) pull += kink.location <= left ? kink.weight : -kink.weight;
    const double x = std::clamp((quad.b - pull) / (2.0 * quad.a), left, right);
    const double v = objective(x);
    if (v > best_v || (v == best_v && x < best_x)) {
      best_v = v;
      best_x = x;
    }
  }
  return {{best_x, best_x}, best_v};
}

// ---------------------------------------------------------------------------
// Best responses

enum class BestResponseMethod { GridOracle, Exact };

struct BestResponse {
  std::vector<double> points;  // ascending; a single point for Exact
  double value = 0.0;

  double representative() const { return points.front(); }
};

inline bool supports_exact(const AgentSpec& agent) {
  return std::holds_alternative<Quadratic>(agent.utility) && linear_slope(agent.c1) &&
         linear_slope(agent.c2) && agent.form.w_u > 0.0;
}

inline BestResponse best_response(const PayoffSlice& slice, const Grid& grid,
                                  BestResponseMethod method) {
  if (method == BestResponseMethod::Exact) {
    const auto& agent = slice.agent();
    if (!supports_exact(agent)) {
      throw Error(ErrorCode::MethodUnsupported,
                  "exact best response needs quadratic utility and linear costs");
    }
    const auto& q = std::get<Quadratic>(agent.utility);
    const auto& w = agent.form;
    const Quadratic scaled{w.w_u * q.a, w.w_u * q.b, w.w_u * q.k};
    const std::array<Kink, 2> kinks{Kink{slice.reference(), w.w_1 * *linear_slope(agent.c1)},
                                    Kink{slice.future(), w.w_2 * *linear_slope(agent.c2)}};
    const auto solved = kinked_concave_argmax(scaled, kinks, 0.0, grid.x_max);
    return {{solved.argmax.lo}, slice(solved.argmax.lo)};
  }
  const auto best = grid_argmax(full_grid(grid), [&](std::size_t j) { return slice(grid.point(j)); });
  return {to_points(best.indices, grid), best.value};
}

/// Argmax of agent i's payoff over [0, x_max]; profile[i] is ignored.
inline BestResponse best_response(const GameSpec& game, std::size_t i,
                                  const StrategyProfile& opponents, const Grid& grid,
                                  BestResponseMethod method = BestResponseMethod::GridOracle) {
  return best_response(PayoffSlice(game, i, opponents), grid, method);
}

inline BestResponse deferral_best_response(const PayoffSlice& slice, const Grid& grid) {
  const auto best = grid_argmax(interval_on_grid(slice.consideration(), grid),
                                [&](std::size_t j) { return slice(grid.point(j)); });
  return {to_points(best.indices, grid), best.value};
}

/// Argmax of agent i's payoff over its consideration set at the opponents'
/// aggregate; profile[i] is ignored.
inline BestResponse deferral_best_response(const GameSpec& game, std::size_t i,
                                           const StrategyProfile& opponents, const Grid& grid) {
  return deferral_best_response(PayoffSlice(game, i, opponents), grid);
}

// ---------------------------------------------------------------------------
// Regret tolerance

namespace detail {

inline double cost_increment(const CostFunction& c, double top, double h) {
  return eval_cost(c, top) - eval_cost(c, std::max(0.0, top - h));
}

}  // namespace detail

/// Default regret tolerance. Exact families (quadratic utility, linear costs)
/// get 1e-9 * (1 + payoff scale); everything else gets the largest payoff
/// change across one grid step.
inline double default_tolerance(const GameSpec& game, const Grid& grid) {
  const bool exact = std::all_of(game.agents.begin(), game.agents.end(), supports_exact);
  double scale = 0.0;
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < game.size(); ++i) {
    const auto& agent = game.agents[i];
    const auto& w = agent.form;
    const double future = aggregate_beliefs(game, i).mean();
    const double reach = std::max(grid.x_max, future);
    double u_max = 0.0, u_step = 0.0;
    double previous = eval_utility(agent.utility, grid.point(0));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = eval_utility(agent.utility, grid.point(j));
      u_max = std::max(u_max, std::abs(v));
      u_step = std::max(u_step, std::abs(v - previous));
      previous = v;
    }
    scale = std::max(scale, w.w_u * u_max + w.w_1 * eval_cost(agent.c1, grid.x_max) +
                                w.w_2 * eval_cost(agent.c2, reach));
    lipschitz = std::max(lipschitz, w.w_u * u_step +
                                        w.w_1 * detail::cost_increment(agent.c1, grid.x_max, grid.step()) +
                                        w.w_2 * detail::cost_increment(agent.c2, reach, grid.step()));
  }
  return exact ? 1e-9 * (1.0 + scale) : lipschitz;
}

// ---------------------------------------------------------------------------
// Classification of a single profile

struct ProfileClassification {
  std::optional<EquilibriumCertificate> certificate;  // nullopt: not an equilibrium
  double standard_regret = 0.0;
  double deferral_regret = 0.0;
  bool inside_consideration = false;
  bool deferral_available = true;  // false when c1 is not strictly increasing
  std::vector<ClosedInterval> per_agent_consideration;
};

/// Runs both membership tests and both regret tests against grid deviations.
inline ProfileClassification classify_profile(const GameSpec& game, const StrategyProfile& profile,
                                              const Grid& grid, double tolerance) {
  detail::check_profile(game, profile);
  ProfileClassification out;
  out.inside_consideration = true;
  const double slack = 1e-9 * grid.step();
  for (std::size_t i = 0; i < game.size(); ++i) {
    const PayoffSlice slice(game, i, profile);
    const double here = slice(profile[i]);
    const auto free_best = best_response(slice, grid, BestResponseMethod::GridOracle);
    out.standard_regret = std::max(out.standard_regret, free_best.value - here);

    if (!out.deferral_available) continue;
    ClosedInterval interval;
    try {
      interval = slice.consideration();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PropOneUnavailable) throw;
      out.deferral_available = false;
      out.inside_consideration = false;
      out.per_agent_consideration.clear();
      continue;
    }
    out.per_agent_consideration.push_back(interval);
    const ClosedInterval snapped{grid.snap(interval.lo), grid.snap(interval.hi)};
    if (!interval.contains(profile[i], slack) && !snapped.contains(profile[i], slack)) {
      out.inside_consideration = false;
    }
    const auto restricted = deferral_best_response(slice, grid);
    out.deferral_regret = std::max(out.deferral_regret, restricted.value - here);
  }
  out.standard_regret = std::max(0.0, out.standard_regret);
  out.deferral_regret = std::max(0.0, out.deferral_regret);

  const bool standard = out.standard_regret <= tolerance;
  const bool deferral =
      out.deferral_available && out.inside_consideration && out.deferral_regret <= tolerance;
  if (standard || deferral) {
    EquilibriumCertificate cert;
    cert.profile = profile;
    cert.per_agent_consideration = out.per_agent_consideration;
    if (standard && deferral) {
      cert.kind = EquilibriumKind::Both;
      cert.max_regret = std::max(out.standard_regret, out.deferral_regret);
    } else if (standard) {
      cert.kind = EquilibriumKind::Standard;
      cert.max_regret = out.standard_regret;
    } else {
      cert.kind = EquilibriumKind::AfterDeferral;
      cert.max_regret = out.deferral_regret;
    }
    out.certificate = std::move(cert);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium search

struct SearchOptions {
  std::size_t lattice_per_axis = 11;  // start lattice for n > 2
  std::size_t max_iterations = 200;
};

namespace detail {

enum class Notion { Standard, Deferral };

/// Exhaustive two-agent scan. For every opponent grid index, the agent's best
/// value (free or over its consideration set) is tabulated once; a grid
/// profile is kept iff both agents are within tolerance of their tabulated
/// best, which is exactly the classify_profile regret test.
inline std::vector<StrategyProfile> exhaustive_two_agent(const GameSpec& game, const Grid& grid,
                                                         double tolerance, Notion notion) {
  const std::size_t n = grid.size();
  struct Table {
    const AgentSpec* agent;
    double future;
    std::vector<double> best;
    std::vector<std::size_t> lo, hi;  // admissible own indices per opponent index
  };
  std::array<Table, 2> tables;
  for (std::size_t i = 0; i < 2; ++i) {
    auto& t = tables[i];
    t.agent = &game.agents[i];
    t.future = aggregate_beliefs(game, i).mean();
    t.best.assign(n, 0.0);
    t.lo.assign(n, 0);
    t.hi.assign(n, n - 1);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        const PayoffSlice slice(*t.agent, grid.point(j), t.future);
        if (notion == Notion::Deferral) {
          const auto range = interval_on_grid(slice.consideration(), grid);
          t.lo[j] = range.front();
          t.hi[j] = range.back();
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t y = t.lo[j]; y <= t.hi[j]; ++y) best = std::max(best, slice(grid.point(y)));
        t.best[j] = best;
      }
    });
  }

  std::vector<std::vector<StrategyProfile>> found(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {  // agent 2's index
      const PayoffSlice first(*tables[0].agent, grid.point(j), tables[0].future);
      for (std::size_t y = tables[0].lo[j]; y <= tables[0].hi[j]; ++y) {
        if (first(grid.point(y)) < tables[0].best[j] - tolerance) continue;
        if (j < tables[1].lo[y] || j > tables[1].hi[y]) continue;
        const PayoffSlice second(*tables[1].agent, grid.point(y), tables[1].future);
        if (second(grid.point(j)) < tables[1].best[y] - tolerance) continue;
        found[j].push_back({{grid.point(y), grid.point(j)}});
      }
    }
  });
  std::vector<StrategyProfile> out;
  for (auto& bucket : found) out.insert(out.end(), bucket.begin(), bucket.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Gauss-Seidel best-response iteration from a start lattice; returns the
/// grid fixed points reached. Completeness is not claimed.
inline std::vector<StrategyProfile> iterate_best_responses(const GameSpec& game, const Grid& grid,
                                                           Notion notion,
                                                           const SearchOptions& options) {
  const std::size_t n = game.size();
  const std::size_t per_axis = std::max<std::size_t>(options.lattice_per_axis, 2);
  std::vector<std::vector<std::size_t>> starts;
  if (n <= 4) {
    std::vector<std::size_t> digits(n, 0);
    while (true) {
      starts.push_back(digits);
      std::size_t d = 0;
      while (d < n && ++digits[d] == per_axis) digits[d++] = 0;
      if (d == n) break;
    }
  } else {
    for (std::size_t s = 0; s < per_axis; ++s) starts.emplace_back(n, s);
  }

  std::vector<std::vector<StrategyProfile>> found(starts.size());
  parallel_for(
      starts.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          StrategyProfile profile;
          for (auto digit : starts[s]) {
            profile.choices.push_back(grid.snap(grid.x_max * static_cast<double>(digit) /
                                                static_cast<double>(per_axis - 1)));
          }
          for (std::size_t it = 0; it < options.max_iterations; ++it) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
              const PayoffSlice slice(game, i, profile);
              const double next = notion == Notion::Standard
                                      ? best_response(slice, grid, BestResponseMethod::GridOracle)
                                            .representative()
                                      : deferral_best_response(slice, grid).representative();
              if (next != profile.choices[i]) {
                profile.choices[i] = next;
                changed = true;
              }
            }
            if (!changed) {
              found[s].push_back(profile);
              break;
            }
          }
        }
      },
      1);
  std::set<StrategyProfile> unique;
  for (auto& bucket : found) unique.insert(bucket.begin(), bucket.end());
  return {unique.begin(), unique.end()};
}

inline std::vector<EquilibriumCertificate> certify(const GameSpec& game, const Grid& grid,
                                                   double tolerance,
                                                   const std::vector<StrategyProfile>& candidates,
                                                   Notion notion) {
  std::vector<std::optional<EquilibriumCertificate>> slots(candidates.size());
  parallel_for(
      candidates.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          auto result = classify_profile(game, candidates[c], grid, tolerance);
          if (!result.certificate) continue;
          const auto kind = result.certificate->kind;
          const bool keep = notion == Notion::Standard ? is_standard(kind) : is_after_deferral(kind);
          if (keep) slots[c] = std::move(result.certificate);
        }
      },
      8);
  std::vector<EquilibriumCertificate> out;
  for (auto& slot : slots) {
    if (slot) out.push_back(std::move(*slot));
  }
  return out;
}

inline std::vector<EquilibriumCertificate> find(const GameSpec& game, const Grid& grid,
                                                double tolerance, Notion notion,
                                                const SearchOptions& options) {
  require_valid(game);
  if (std::abs(grid.x_max - game.x_max) > 1e-12 * game.x_max) {
    throw Error(ErrorCode::Configuration, "grid bound differs from the game's strategy bound");
  }
  const auto candidates = game.size() == 2 ? exhaustive_two_agent(game, grid, tolerance, notion)
                                           : iterate_best_responses(game, grid, notion, options);
  return certify(game, grid, tolerance, candidates, notion);
}

}  // namespace detail

/// Profiles with no profitable grid deviation for any agent. Exhaustive on the
/// grid for two agents; best-response iteration from a lattice otherwise.
/// Certificates carry kind Standard, or Both when the deferral test also passes.
inline std::vector<EquilibriumCertificate> find_equilibria(const GameSpec& game, const Grid& grid,
                                                           double tolerance,
                                                           const SearchOptions& options = {}) {
  return detail::find(game, grid, tolerance, detail::Notion::Standard, options);
}

/// Profiles where every choice lies in its agent's consideration set and is
/// optimal there. Kind AfterDeferral, or Both when also a standard equilibrium.
inline std::vector<EquilibriumCertificate> find_equilibria_after_deferral(
    const GameSpec& game, const Grid& grid, double tolerance, const SearchOptions& options = {}) {
  return detail::find(game, grid, tolerance, detail::Notion::Deferral, options);
}

}  // namespace fundchoice
