// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "cases.hpp"
#include "support.hpp"

namespace {

using namespace fundchoice;
using fundchoice::testing::Draws;
using fundchoice::testing::LinearAgent;
namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Grid indices nearest to min/max(x_s, b/2a), computed without the library.
std::pair<std::size_t, std::size_t> snapped_bounds(const LinearAgent& a, double x_s, const Grid& g) {
  const double star = std::max(0.0, a.b / (2.0 * a.a));
  const auto idx = [&](double x) {
    return static_cast<std::size_t>(std::llround(std::min(x, g.x_max) / g.step()));
  };
  return {idx(std::min(x_s, star)), idx(std::max(x_s, star))};
}

Outcome criterion1() {
  Draws draws(1001);
  const Grid grid{20.0, 800};
  const auto start = Clock::now();
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const auto a = fundchoice::testing::draw_agent(draws, false);
    const double x_s = draws.uniform(0.0, 10.0);
    const Quadratic u{a.a, a.b, a.k};
    const auto maximal = maximal_set_grid(u, LinearCost{a.d1}, x_s, grid);
    const auto interval = interval_on_grid(consideration_interval(u, LinearCost{a.d1}, x_s), grid);
    if (maximal != interval) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          fmt::format("{} of 200 scenarios differ, {:.2f} s (limit 10 s)", mismatches, elapsed)};
}

Outcome criterion2() {
  Draws draws(1001);
  const Grid grid{20.0, 800};
  int failures = 0;
  for (int t = 0; t < 200; ++t) {
    auto a = fundchoice::testing::draw_agent(draws, false);
    const double x_s = draws.uniform(0.0, 10.0);
    a.d2 = draws.positive(10.0);
    a.f = draws.uniform(0.0, 20.0);
    const auto choice = second_stage_choice(a.spec(), x_s, grid);
    const auto [lo, hi] = snapped_bounds(a, x_s, grid);
    bool ok = true;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double v = a.value(grid.point(j), x_s);
      const bool chosen =
          std::binary_search(choice.chosen_indices.begin(), choice.chosen_indices.end(), j);
      if (v > choice.value + 1e-12) ok = false;
      if (chosen != (std::abs(v - choice.value) <= 1e-12)) ok = false;
    }
    for (auto j : choice.chosen_indices) ok = ok && j >= lo && j <= hi;
    if (!ok) ++failures;
  }
  return {failures == 0, fmt::format("{} of 200 scenarios violate the argmax oracle (tol 1e-12)", failures)};
}

Outcome criterion3() {
  Draws draws(1003);
  int failures = 0;
  double slowest = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto a = fundchoice::testing::draw_agent(draws, true);
    const double x_s = draws.uniform(0.0, 10.0);
    const Grid grid{20.0, 400};
    const auto start = Clock::now();
    const bool holds = two_criteria_certificate(a.spec(), x_s, grid).holds;
    slowest = std::max(slowest, seconds_since(start));
    if (!holds) ++failures;
  }
  return {failures == 0 && slowest < 5.0,
          fmt::format("{} of 100 certificates fail, slowest {:.3f} s (limit 5 s)", failures, slowest)};
}

Outcome criterion4() {
  const auto game = fundchoice::testing::akerlof_game();
  const Grid grid{8.0, 1600};
  const double tol = default_tolerance(game, grid);
  const auto start = Clock::now();
  const auto standard = find_equilibria(game, grid, tol);
  const auto deferred = find_equilibria_after_deferral(game, grid, tol);
  const double elapsed = seconds_since(start);

  // Expected: every diagonal grid profile with x in [0, 2], within one step at the ends.
  const auto matches = [&](const std::vector<EquilibriumCertificate>& certs) {
    if (certs.empty()) return false;
    for (const auto& c : certs) {
      if (c.profile[0] != c.profile[1]) return false;
      if (c.profile[0] < -grid.step() || c.profile[0] > 2.0 + grid.step()) return false;
    }
    std::vector<double> xs;
    for (const auto& c : certs) xs.push_back(c.profile[0]);
    std::sort(xs.begin(), xs.end());
    for (std::size_t j = 1; j < xs.size(); ++j) {
      if (std::abs(xs[j] - xs[j - 1] - grid.step()) > 1e-9) return false;
    }
    return xs.front() <= grid.step() && xs.back() >= 2.0 - grid.step();
  };
  const bool same = standard.size() == deferred.size() &&
                    std::equal(standard.begin(), standard.end(), deferred.begin(),
                               [](const auto& x, const auto& y) { return x.profile == y.profile; });
  return {matches(standard) && matches(deferred) && same && elapsed < 60.0,
          fmt::format("standard {} profiles on [{}, {}], after deferral {} profiles, same set: {}, "
                      "{:.2f} s (limit 60 s)",
                      standard.size(), standard.empty() ? NAN : standard.front().profile[0],
                      standard.empty() ? NAN : standard.back().profile[0], deferred.size(),
                      same ? "yes" : "no", elapsed)};
}

Outcome criterion5() {
  Draws draws(1005);
  const Grid grid{20.0, 200};
  int games = 0, asymmetric = 0, missing = 0;
  std::size_t deferral_certs = 0, symmetric_standard = 0;
  for (int t = 0; t < 50; ++t) {
    auto first = fundchoice::testing::draw_agent(draws, true);
    auto second = fundchoice::testing::draw_agent(draws, true);
    second.a = first.a;
    second.b = first.b;
    second.k = first.k;
    second.w_1 = draws.uniform(0.2, 3.0);
    second.w_2 = draws.uniform(0.0, 3.0);
    const auto game = fundchoice::testing::two_agent_game(first.spec(), second.spec(), 20.0);
    const double tol = default_tolerance(game, grid);
    ++games;
    for (const auto& c : find_equilibria_after_deferral(game, grid, tol)) {
      ++deferral_certs;
      if (std::abs(c.profile[0] - c.profile[1]) > grid.step() + 1e-12) ++asymmetric;
    }
    for (const auto& c : find_equilibria(game, grid, tol)) {
      if (c.profile[0] != c.profile[1]) continue;
      ++symmetric_standard;
      if (c.kind != EquilibriumKind::Both) ++missing;
    }
  }
  return {asymmetric == 0 && missing == 0,
          fmt::format("{} games: {} after-deferral certificates, {} off-diagonal; {} symmetric "
                      "standard certificates, {} not after deferral",
                      games, deferral_certs, asymmetric, symmetric_standard, missing)};
}

Outcome criterion6() {
  const auto scenario = cli::example42_case();
  const auto game = scenario.game();
  const auto& grid = scenario.grid;
  const double tol = scenario.resolved_tolerance();
  const auto output = cli::reproduce_example42(scenario);

  const auto deferred = find_equilibria_after_deferral(game, grid, tol);
  const auto standard = find_equilibria(game, grid, tol);
  bool diagonal = !deferred.empty();
  for (const auto& c : deferred) diagonal = diagonal && c.profile[0] == c.profile[1];

  const auto printed = classify_profile(game, {{3.75, 4.0}}, grid, tol);
  const bool printed_not_deferral =
      !printed.inside_consideration && !(printed.certificate && is_after_deferral(printed.certificate->kind));

  std::size_t reverified = 0, total = 0;
  for (const auto* set : {&standard, &deferred}) {
    for (const auto& c : *set) {
      ++total;
      const auto again = classify_profile(game, c.profile, grid, tol);
      if (again.certificate && again.certificate->kind == c.kind && again.certificate->max_regret <= tol) {
        ++reverified;
      }
    }
  }

  const auto it = output.files.find("example42_discrepancy.csv");
  bool report = it != output.files.end();
  if (report) {
    for (const char* needle : {",1.75,", ",4,", ",3.75,", ",32.125,", ",21.625,"}) {
      report = report && it->second.find(needle) != std::string::npos;
    }
  }
  const bool extent_reported = output.summary.find("equilibria after deferral") != std::string::npos;
  return {diagonal && printed_not_deferral && reverified == total && report && extent_reported,
          fmt::format("after-deferral set diagonal: {} ({} profiles on [{}, {}] vs printed [1, 3.75]); "
                      "(3.75, 4) not after deferral: {}; {}/{} certificates re-verify; report: {}",
                      diagonal ? "yes" : "no", deferred.size(),
                      deferred.empty() ? NAN : deferred.front().profile[0],
                      deferred.empty() ? NAN : deferred.back().profile[0],
                      printed_not_deferral ? "yes" : "no", reverified, total,
                      report && extent_reported ? "complete" : "missing")};
}

Outcome criterion7() {
  Draws draws(1007);
  const Grid grid{20.0, 800};
  int trapped = 0;
  for (int t = 0; t < 100; ++t) {
    auto a = fundchoice::testing::draw_agent(draws, true);
    a.w_2 = 0.0;
    if (detect_trap(a.spec(), draws.uniform(0.0, 10.0), grid).trapped) ++trapped;
  }
  const Grid fine{10.0, 4000};
  const auto extreme = detect_trap(LinearAgent{2, 4, 5, 1, 10, 6}.spec(), 2.0, fine);
  const bool extreme_ok = extreme.trapped && std::abs(extreme.x_hat - 3.25) <= fine.step() &&
                          extreme.interval == ClosedInterval{1, 2};
  return {trapped == 0 && extreme_ok,
          fmt::format("{} of 100 no-future-cost scenarios trapped; extreme belief: trapped={}, "
                      "x_hat={} (expected 3.25 +- {}), interval [{}, {}]",
                      trapped, extreme.trapped, extreme.x_hat, fine.step(), extreme.interval.lo,
                      extreme.interval.hi)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome criterion8() {
  const fs::path root = fs::temp_directory_path() / "fundchoice_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* sub : {"a", "b"}) {
    const auto dir = root / sub;
    const std::string cmd = fmt::format("\"{}\" reproduce --case akerlof --out \"{}\" > \"{}\" 2>&1",
                                        FUNDCHOICE_CLI, dir.string(), (root / (std::string(sub) + ".log")).string());
    fs::create_directories(root);
    if (std::system(cmd.c_str()) != 0) return {false, "reproduce --case akerlof failed: " + cmd};
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv") files[entry.path().filename().string()] = slurp(entry.path());
    }
    runs.push_back(std::move(files));
  }
  fs::remove_all(root);
  const bool same = !runs[0].empty() && runs[0] == runs[1];
  return {same, fmt::format("{} CSV files per run, byte-identical: {}", runs[0].size(), same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 consideration set equals interval on grid", criterion1},
      {"2 second-stage choice is the interval argmax", criterion2},
      {"3 two sequential criteria certificate", criterion3},
      {"4 conformist baseline equilibria", criterion4},
      {"5 two-agent symmetry after deferral", criterion5},
      {"6 extreme-belief example reproduction", criterion6},
      {"7 indecisiveness trap", criterion7},
      {"8 deterministic reproduce output", criterion8},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
