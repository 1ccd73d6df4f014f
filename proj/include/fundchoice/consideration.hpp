#pragma once

// First stage: the one-many ordering and the consideration set it induces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fundchoice/error.hpp"
#include "fundchoice/model.hpp"
#include "fundchoice/parallel.hpp"

namespace fundchoice {

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool is_singleton() const { return lo == hi; }
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
  /// Distance from x to the interval, zero inside.
  double gap(double x) const { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }

  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

struct DominanceVerdict {
  bool weak = false;    // x_i >= x_j in the one-many ordering
  bool strict = false;  // x_i > x_j

  friend bool operator==(const DominanceVerdict&, const DominanceVerdict&) = default;
};

/// Sorted grid indices.
using GridSet = std::vector<std::size_t>;

inline constexpr double kSingletonTolerance = 1e-12;

namespace detail {

inline bool weakly_dominates(double u_i, double c_i, double u_j, double c_j) {
  return u_i >= u_j && c_i <= c_j;
}

}  // namespace detail

inline DominanceVerdict one_many_compare(double x_i, double x_j, const UtilityFunction& u,
                                         const CostFunction& c1, double x_s) {
  if (x_i < 0.0 || x_j < 0.0 || x_s < 0.0) {
    throw Error(ErrorCode::Domain, "one-many comparison of a negative choice");
  }
  const double u_i = eval_utility(u, x_i);
  const double u_j = eval_utility(u, x_j);
  const double c_i = eval_cost(c1, distance(x_i, x_s));
  const double c_j = eval_cost(c1, distance(x_j, x_s));
  const bool forward = detail::weakly_dominates(u_i, c_i, u_j, c_j);
  const bool backward = detail::weakly_dominates(u_j, c_j, u_i, c_i);
  return {forward, forward && !backward};
}

/// Closed-form consideration set [min(x_s, x*), max(x_s, x*)] for a strictly
/// quasiconcave u and a strictly increasing c1.
inline ClosedInterval consideration_interval(const UtilityFunction& u, const CostFunction& c1,
                                             double x_s) {
  if (x_s < 0.0) throw Error(ErrorCode::Domain, "negative social choice");
  require_valid(u);
  require_valid(c1);
  if (!is_strictly_increasing(c1)) {
    throw Error(ErrorCode::PropOneUnavailable,
                "closed-form consideration set requires a strictly increasing c1");
  }
  const double peak = personal_optimum(u);
  if (std::abs(x_s - peak) <= kSingletonTolerance) return {peak, peak};
  return {std::min(x_s, peak), std::max(x_s, peak)};
}

/// Grid points of an interval whose endpoints are snapped to their nearest
/// grid points.
inline GridSet interval_on_grid(const ClosedInterval& interval, const Grid& grid) {
  const std::size_t lo = grid.nearest_index(interval.lo);
  const std::size_t hi = grid.nearest_index(interval.hi);
  GridSet out;
  out.reserve(hi - lo + 1);
  for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
  return out;
}

inline std::vector<double> to_points(const GridSet& set, const Grid& grid) {
  std::vector<double> out;
  out.reserve(set.size());
  for (auto j : set) out.push_back(grid.point(j));
  return out;
}

/// Grid points that no other grid point strictly dominates. Exhaustive pairwise
/// scan; valid without any quasiconcavity assumption.
inline GridSet maximal_set_grid(const UtilityFunction& u, const CostFunction& c1, double x_s,
                                const Grid& grid) {
  if (x_s < 0.0) throw Error(ErrorCode::Domain, "negative social choice");
  const std::size_t n = grid.size();
  std::vector<double> util(n), cost(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.point(j);
    util[j] = eval_utility(u, x);
    cost[j] = eval_cost(c1, distance(x, x_s));
  }
  std::vector<char> maximal(n, 1);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
          for (std::size_t k = 0; k < n; ++k) {
            if (detail::weakly_dominates(util[k], cost[k], util[j], cost[j]) &&
                !detail::weakly_dominates(util[j], cost[j], util[k], cost[k])) {
              maximal[j] = 0;
              break;
            }
          }
        }
      },
      64);
  GridSet out;
  for (std::size_t j = 0; j < n; ++j) {
    if (maximal[j]) out.push_back(j);
  }
  return out;
}

}  // namespace fundchoice
