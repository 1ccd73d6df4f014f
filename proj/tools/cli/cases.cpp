#include "cases.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "format.hpp"
#include "fundchoice/welfare.hpp"
#include "report.hpp"

namespace fundchoice::cli {

namespace {

AgentSpec conformist(double present_weight, double future_weight, double belief) {
  AgentSpec agent;
  agent.utility = Quadratic{2.0, 4.0, 5.0};
  agent.c1 = LinearCost{present_weight};
  agent.c2 = future_weight > 0.0 ? CostFunction{LinearCost{future_weight}} : CostFunction{ZeroCost{}};
  agent.beliefs = {FiniteRandomVariable::point_mass(belief)};
  return agent;
}

class Discrepancies {
 public:
  void add(const std::string& quantity, double printed, double oracle, double tolerance) {
    const bool agrees = std::abs(printed - oracle) <= tolerance;
    csv_.row({quantity, num(printed), num(oracle), num(tolerance), agrees ? "1" : "0"});
    text_ += fmt::format("  {:<34} printed {:>12}  oracle {:>12}  {}\n", quantity, num(printed),
                         num(oracle), agrees ? "agrees" : "DIFFERS");
  }

  const std::string& csv() const { return csv_.str(); }
  const std::string& text() const { return text_; }

 private:
  CsvWriter csv_{{"quantity", "printed", "oracle", "tolerance", "agrees"}};
  std::string text_;
};

double flag(bool b) { return b ? 1.0 : 0.0; }

bool all_reverify(const GameSpec& game, const Grid& grid, double tolerance,
                  const std::vector<EquilibriumCertificate>& certs) {
  return std::all_of(certs.begin(), certs.end(), [&](const EquilibriumCertificate& c) {
    const auto again = classify_profile(game, c.profile, grid, tolerance);
    return again.certificate && again.certificate->kind == c.kind &&
           again.certificate->max_regret <= tolerance;
  });
}

}  // namespace

Scenario akerlof_case(std::size_t steps) {
  Scenario s;
  s.mode = Mode::Game;
  s.grid = {8.0, steps};
  s.agents = {conformist(4.0, 0.0, 0.0), conformist(4.0, 0.0, 0.0)};
  return s;
}

Scenario example42_case(std::size_t steps) {
  Scenario s;
  s.mode = Mode::Game;
  s.grid = {40.0, steps};
  s.agents = {conformist(7.0, 4.0, 10.0), conformist(16.0, 4.0, 10.0)};
  return s;
}

Scenario trap_case(std::size_t steps) {
  Scenario s;
  s.mode = Mode::SingleAgent;
  s.grid = {10.0, steps};
  s.x_s = 2.0;
  AgentSpec agent;
  agent.utility = Quadratic{2.0, 4.0, 5.0};
  agent.c1 = LinearCost{1.0};
  agent.c2 = LinearCost{10.0};
  agent.beliefs = {FiniteRandomVariable::point_mass(6.0)};
  s.agents = {agent};
  return s;
}

Scenario trap_contrast_case(std::size_t steps) {
  Scenario s = trap_case(steps);
  s.agents.front().beliefs = {FiniteRandomVariable::point_mass(1.5)};
  return s;
}

CaseOutput reproduce_akerlof(const Scenario& scenario) {
  const auto game = scenario.game();
  const auto& grid = scenario.grid;
  const double tol = scenario.resolved_tolerance();
  const double h = grid.step();

  const auto standard = find_equilibria(game, grid, tol);
  const auto deferred = find_equilibria_after_deferral(game, grid, tol);
  const auto se = extent(standard, grid);
  const auto de = extent(deferred, grid);

  CsvWriter curve({"opponent", "response_grid", "response_exact", "response_printed"});
  const std::size_t stride = std::max<std::size_t>(1, grid.steps / 160);
  for (std::size_t j = 0; j < grid.size(); j += stride) {
    const StrategyProfile opp{{0.0, grid.point(j)}};
    const double printed =
        std::clamp(grid.point(j), printed::kConformistLow, printed::kConformistHigh);
    curve.row({num(grid.point(j)),
               num(best_response(game, 0, opp, grid, BestResponseMethod::GridOracle).representative()),
               num(best_response(game, 0, opp, grid, BestResponseMethod::Exact).representative()),
               num(printed)});
  }

  std::vector<StrategyProfile> sp, dp;
  for (const auto& c : standard) sp.push_back(c.profile);
  for (const auto& c : deferred) dp.push_back(c.profile);
  std::size_t loss_pairs = 0;
  for (const auto& s : standard) {
    if (s.kind != EquilibriumKind::Standard) continue;
    for (const auto& d : deferred) {
      if (d.kind == EquilibriumKind::AfterDeferral && pareto_dominates(game, s.profile, d.profile)) {
        ++loss_pairs;
      }
    }
  }

  Discrepancies report;
  report.add("standard_set_low", printed::kConformistLow, se.lo, h);
  report.add("standard_set_high", printed::kConformistHigh, se.hi, h);
  report.add("standard_set_symmetric", 1.0, flag(se.diagonal), 0.0);
  report.add("deferral_set_low", printed::kConformistLow, de.lo, h);
  report.add("deferral_set_high", printed::kConformistHigh, de.hi, h);
  report.add("deferral_set_symmetric", 1.0, flag(de.diagonal), 0.0);
  report.add("deferral_set_equals_standard_set", 1.0, flag(sp == dp), 0.0);
  report.add("deferral_loss_pairs", 0.0, static_cast<double>(loss_pairs), 0.0);
  report.add("certificates_reverified", 1.0,
             flag(all_reverify(game, grid, tol, standard) && all_reverify(game, grid, tol, deferred)),
             0.0);

  CaseOutput out;
  out.files["akerlof_equilibria.csv"] = equilibria_csv(standard, game.size());
  out.files["akerlof_deferral_equilibria.csv"] = equilibria_csv(deferred, game.size());
  out.files["akerlof_best_response.csv"] = curve.str();
  out.files["akerlof_discrepancy.csv"] = report.csv();
  out.summary = fmt::format(
      "conformist baseline (grid step {}, tolerance {})\n"
      "  standard equilibria:       {}\n"
      "  equilibria after deferral: {}\n{}",
      num(h), num(tol), describe(se), describe(de), report.text());
  return out;
}

CaseOutput reproduce_example42(const Scenario& scenario) {
  const auto game = scenario.game();
  const auto& grid = scenario.grid;
  const double tol = scenario.resolved_tolerance();
  const double h = grid.step();

  const auto respond = [&](std::size_t agent, double opponent, BestResponseMethod method) {
    StrategyProfile opp{{opponent, opponent}};
    return best_response(game, agent, opp, grid, method).representative();
  };
  const auto printed_first = [](double x2) {
    if (x2 <= printed::kFirstLowPlateau) return printed::kFirstLowPlateau;
    if (x2 <= printed::kFirstHighPlateau) return x2;
    return printed::kFirstHighPlateau;
  };
  const auto printed_second = [](double x1) {
    if (x1 < printed::kSecondLowPlateau) return printed::kSecondLowPlateau;
    if (x1 <= printed::kSecondHighPlateau) return x1;
    return printed::kSecondHighPlateau;
  };

  CsvWriter curves({"opponent", "first_grid", "first_exact", "first_printed", "second_grid",
                    "second_exact", "second_printed"});
  const std::size_t last = grid.nearest_index(8.0);
  const std::size_t stride = std::max<std::size_t>(1, last / 160);
  for (std::size_t j = 0; j <= last; j += stride) {
    const double x = grid.point(j);
    curves.row({num(x), num(respond(0, x, BestResponseMethod::GridOracle)),
                num(respond(0, x, BestResponseMethod::Exact)), num(printed_first(x)),
                num(respond(1, x, BestResponseMethod::GridOracle)),
                num(respond(1, x, BestResponseMethod::Exact)), num(printed_second(x))});
  }

  const auto standard = find_equilibria(game, grid, tol);
  const auto deferred = find_equilibria_after_deferral(game, grid, tol);
  const auto se = extent(standard, grid);
  const auto de = extent(deferred, grid);

  const StrategyProfile printed_eq{{printed::kEquilibriumFirst, printed::kEquilibriumSecond}};
  const auto printed_class = classify_profile(game, printed_eq, grid, tol);
  const bool printed_standard =
      printed_class.certificate && is_standard(printed_class.certificate->kind);
  const bool printed_deferral =
      printed_class.certificate && is_after_deferral(printed_class.certificate->kind);

  const StrategyProfile at_one{{1.0, 1.0}};
  const StrategyProfile at_three_halves{{1.5, 1.5}};
  const StrategyProfile at_two{{2.0, 2.0}};
  const auto gap_one = welfare_gap(game, printed_eq, at_one);
  const auto gap_three_halves = welfare_gap(game, printed_eq, at_three_halves);

  std::string gate_text;
  const auto gate = [&](const StrategyProfile& dominated) {
    EquilibriumCertificate s{printed_eq, EquilibriumKind::Standard, 0.0, {}};
    EquilibriumCertificate d{dominated, EquilibriumKind::AfterDeferral, 0.0, {}};
    try {
      const auto loss = deferral_loss(game, s, d, grid, tol);
      gate_text += fmt::format("  deferral loss vs ({}, {}): {}\n", num(dominated[0]),
                               num(dominated[1]), num(loss.total));
      return true;
    } catch (const LossPreconditionError& e) {
      gate_text += fmt::format("  deferral loss vs ({}, {}): gate refused, {}\n", num(dominated[0]),
                               num(dominated[1]), to_string(e.which()));
      return false;
    }
  };
  const bool gate_one = gate(at_one);
  const bool gate_three_halves = gate(at_three_halves);

  const auto coordinate_bound = [&](const std::vector<EquilibriumCertificate>& c, std::size_t i, bool max) {
    double v = max ? -1.0 : grid.x_max + 1.0;
    for (const auto& cert : c) v = max ? std::max(v, cert.profile[i]) : std::min(v, cert.profile[i]);
    return c.empty() ? std::nan("") : v;
  };

  Discrepancies report;
  report.add("first_response_low_plateau", printed::kFirstLowPlateau,
             respond(0, 0.0, BestResponseMethod::GridOracle), h);
  report.add("first_response_high_plateau", printed::kFirstHighPlateau,
             respond(0, grid.x_max, BestResponseMethod::GridOracle), h);
  report.add("second_response_low_plateau", printed::kSecondLowPlateau,
             respond(1, 0.0, BestResponseMethod::GridOracle), h);
  report.add("second_response_high_plateau", printed::kSecondHighPlateau,
             respond(1, grid.x_max, BestResponseMethod::GridOracle), h);
  report.add("printed_pair_is_standard", 1.0, flag(printed_standard), 0.0);
  report.add("printed_pair_is_after_deferral", 0.0, flag(printed_deferral), 0.0);
  report.add("standard_set_size", 1.0, static_cast<double>(standard.size()), 0.0);
  if (!standard.empty()) {
    report.add("standard_set_coordinate_bound", printed::kEquilibriumFirst, coordinate_bound(standard, 0, false), h);
    report.add("standard_set_first_max", printed::kEquilibriumFirst, coordinate_bound(standard, 0, true), h);
    report.add("standard_set_second_min", printed::kEquilibriumSecond, coordinate_bound(standard, 1, false), h);
    report.add("standard_set_second_max", printed::kEquilibriumSecond, coordinate_bound(standard, 1, true), h);
  }
  report.add("deferral_set_symmetric", 1.0, flag(de.diagonal), 0.0);
  if (!deferred.empty()) {
    report.add("deferral_set_low", printed::kDeferralLow, de.lo, h);
    report.add("deferral_set_high", printed::kDeferralHigh, de.hi, h);
  }
  report.add("welfare_gap_vs_1_1", printed::kLossVsOne, gap_one.total, 1e-9);
  report.add("welfare_gap_vs_3/2_3/2", printed::kLossVsThreeHalves, gap_three_halves.total, 1e-9);
  report.add("loss_gate_accepts_vs_1_1", 1.0, flag(gate_one), 0.0);
  report.add("loss_gate_accepts_vs_3/2_3/2", 1.0, flag(gate_three_halves), 0.0);
  report.add("first_payoff_at_2_2", printed::kFirstPayoffAtTwo, payoff(game, 0, at_two), 1e-9);
  report.add("first_payoff_at_printed_pair", printed::kFirstPayoffAtEquilibrium,
             payoff(game, 0, printed_eq), 1e-9);
  report.add("certificates_reverified", 1.0,
             flag(all_reverify(game, grid, tol, standard) && all_reverify(game, grid, tol, deferred)),
             0.0);

  CaseOutput out;
  out.files["example42_best_responses.csv"] = curves.str();
  out.files["example42_equilibria.csv"] = equilibria_csv(standard, game.size());
  out.files["example42_deferral_equilibria.csv"] = equilibria_csv(deferred, game.size());
  out.files["example42_discrepancy.csv"] = report.csv();
  out.summary = fmt::format(
      "extreme-belief example (grid step {}, tolerance {})\n"
      "  standard equilibria:       {}\n"
      "  equilibria after deferral: {}\n"
      "  printed pair ({}, {}): {}\n{}{}",
      num(h), num(tol), describe(se), describe(de), num(printed_eq[0]), num(printed_eq[1]),
      printed_class.certificate ? std::string(to_string(printed_class.certificate->kind))
                                : std::string("NotEquilibrium"),
      gate_text, report.text());
  return out;
}

CaseOutput reproduce_trap(const Scenario& extreme, const Scenario& contrast) {
  CsvWriter csv({"scenario", "x_s", "belief_mean", "interval_lo", "interval_hi", "x_hat",
                 "x_dagger", "trapped", "utility_gap", "grid_step"});
  std::string text = "indecisiveness trap\n";
  for (const auto& [name, s] : {std::pair<std::string, const Scenario*>{"extreme", &extreme},
                                {"centered", &contrast}}) {
    const auto report = detect_trap(s->agent(), *s->x_s, s->grid);
    csv.row({name, num(*s->x_s), num(expected_future_choice(s->agent())), num(report.interval.lo),
             num(report.interval.hi), num(report.x_hat), num(report.x_dagger),
             report.trapped ? "1" : "0", num(report.utility_gap), num(s->grid.step())});
    text += fmt::format("  {:<9} interval [{}, {}]  x_hat {}  chosen {}  trapped {}  gap {}\n", name,
                        num(report.interval.lo), num(report.interval.hi), num(report.x_hat),
                        num(report.x_dagger), report.trapped ? "yes" : "no", num(report.utility_gap));
  }
  CaseOutput out;
  out.files["trap.csv"] = csv.str();
  out.summary = text;
  return out;
}

}  // namespace fundchoice::cli
