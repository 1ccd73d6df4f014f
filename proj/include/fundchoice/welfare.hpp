#pragma once

// Pareto comparison of profiles and the deferral loss.

#include <cstddef>
#include <string>
#include <vector>

#include "fundchoice/game.hpp"

namespace fundchoice {

inline constexpr double kStrictnessTolerance = 1e-12;

struct WelfareReport {
  StrategyProfile dominant;
  StrategyProfile dominated;
  std::vector<double> per_agent_gaps;  // payoff(i, dominant) - payoff(i, dominated)
  double total = 0.0;
};

/// p Pareto-dominates q: nobody is worse off and somebody is strictly better.
inline bool pareto_dominates(const GameSpec& game, const StrategyProfile& p,
                             const StrategyProfile& q) {
  bool strict = false;
  for (std::size_t i = 0; i < game.size(); ++i) {
    const double gain = payoff(game, i, p) - payoff(game, i, q);
    if (gain < -kStrictnessTolerance) return false;
    if (gain > kStrictnessTolerance) strict = true;
  }
  return strict;
}

/// Unguarded welfare difference between p and q; no sign constraint.
inline WelfareReport welfare_gap(const GameSpec& game, const StrategyProfile& p,
                                 const StrategyProfile& q) {
  WelfareReport report{p, q, {}, 0.0};
  for (std::size_t i = 0; i < game.size(); ++i) {
    report.per_agent_gaps.push_back(payoff(game, i, p) - payoff(game, i, q));
    report.total += report.per_agent_gaps.back();
  }
  return report;
}

enum class LossPrecondition {
  StandardNotStrictlyStandard,  // the dominant profile must be an equilibrium but not after deferral
  DeferredNotStrictlyDeferred,  // the dominated profile must be after deferral but not an equilibrium
  NotParetoDominated,
};

inline std::string_view to_string(LossPrecondition code) {
  switch (code) {
    case LossPrecondition::StandardNotStrictlyStandard: return "StandardNotStrictlyStandard";
    case LossPrecondition::DeferredNotStrictlyDeferred: return "DeferredNotStrictlyDeferred";
    case LossPrecondition::NotParetoDominated: return "NotParetoDominated";
  }
  return "Unknown";
}

class LossPreconditionError : public Error {
 public:
  explicit LossPreconditionError(LossPrecondition which)
      : Error(ErrorCode::PreconditionViolated, std::string(to_string(which))), which_(which) {}

  LossPrecondition which() const noexcept { return which_; }

 private:
  LossPrecondition which_;
};

/// Deferral loss of `deferred` with respect to `standard`. Both certificates
/// are re-classified on the grid, so a stale or hand-built certificate cannot
/// slip past the gate.
inline WelfareReport deferral_loss(const GameSpec& game, const EquilibriumCertificate& standard,
                                   const EquilibriumCertificate& deferred, const Grid& grid,
                                   double tolerance) {
  const auto s = classify_profile(game, standard.profile, grid, tolerance);
  if (standard.kind != EquilibriumKind::Standard || !s.certificate ||
      s.certificate->kind != EquilibriumKind::Standard) {
    throw LossPreconditionError(LossPrecondition::StandardNotStrictlyStandard);
  }
  const auto d = classify_profile(game, deferred.profile, grid, tolerance);
  if (deferred.kind != EquilibriumKind::AfterDeferral || !d.certificate ||
      d.certificate->kind != EquilibriumKind::AfterDeferral) {
    throw LossPreconditionError(LossPrecondition::DeferredNotStrictlyDeferred);
  }
  if (!pareto_dominates(game, standard.profile, deferred.profile)) {
    throw LossPreconditionError(LossPrecondition::NotParetoDominated);
  }
  return welfare_gap(game, standard.profile, deferred.profile);
}

inline WelfareReport deferral_loss(const GameSpec& game, const EquilibriumCertificate& standard,
                                   const EquilibriumCertificate& deferred, const Grid& grid) {
  return deferral_loss(game, standard, deferred, grid, default_tolerance(game, grid));
}

}  // namespace fundchoice
