#pragma once

// Built-in reproduction cases: the conformist baseline, the two-agent
// extreme-belief example, and the indecisiveness-trap pair.

#include <map>
#include <string>

#include "scenario.hpp"

namespace fundchoice::cli {

/// Two identical conformist agents: u = -2x^2 + 4x + 5, c1 = 4|.|, no future
/// cost, choices bounded by 8.
Scenario akerlof_case(std::size_t steps = 1600);

/// Extreme beliefs: a=2, b=4, k=5, future weight 4, present weights 7 and 16,
/// both beliefs a point mass at 10, choices bounded by 40.
Scenario example42_case(std::size_t steps = 3200);

/// u = -2x^2 + 4x + 5, c1 = |.| around x_s = 2, c2 = 10|.| around a belief at 6.
Scenario trap_case(std::size_t steps = 4000);

/// Same agent with the belief centred inside its consideration interval.
Scenario trap_contrast_case(std::size_t steps = 4000);

/// Files produced by a reproduction run, keyed by file name, plus a
/// human-readable summary.
struct CaseOutput {
  std::map<std::string, std::string> files;
  std::string summary;
};

CaseOutput reproduce_akerlof(const Scenario& scenario);
CaseOutput reproduce_example42(const Scenario& scenario);
CaseOutput reproduce_trap(const Scenario& extreme, const Scenario& contrast);

/// Values printed alongside the worked examples; reference constants for the
/// discrepancy reports, never used as oracle truth.
namespace printed {
inline constexpr double kConformistLow = 0.0;   // (b - d) / 2a
inline constexpr double kConformistHigh = 2.0;  // (b + d) / 2a
inline constexpr double kFirstLowPlateau = 7.0 / 4.0;
inline constexpr double kFirstHighPlateau = 15.0 / 4.0;
inline constexpr double kSecondLowPlateau = 4.0;
inline constexpr double kSecondHighPlateau = 6.0;
inline constexpr double kEquilibriumFirst = 15.0 / 4.0;
inline constexpr double kEquilibriumSecond = 4.0;
inline constexpr double kDeferralLow = 1.0;
inline constexpr double kDeferralHigh = 15.0 / 4.0;
inline constexpr double kLossVsOne = 32.125;
inline constexpr double kLossVsThreeHalves = 21.625;
inline constexpr double kFirstPayoffAtTwo = -261.0;
inline constexpr double kFirstPayoffAtEquilibrium = -262.875;
}  // namespace printed

}  // namespace fundchoice::cli
