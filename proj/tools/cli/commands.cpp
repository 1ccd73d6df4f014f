#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cases.hpp"
#include "format.hpp"
#include "fundchoice/fundchoice.hpp"
#include "report.hpp"
#include "scenario.hpp"

namespace fundchoice::cli {

namespace fs = std::filesystem;

namespace {

using Files = std::map<std::string, std::string>;

struct Options {
  std::string scenario_path;
  std::string out_dir;
  std::size_t agent = 1;
  std::string sweep;
  std::string method = "grid";
  bool deferral = false;
  std::string standard_path;
  std::string deferred_path;
  std::string case_name;
  std::optional<std::size_t> steps;
};

/// Writes every file only after all of them are computed; each goes through a
/// temporary name so a failed write never leaves a truncated CSV behind.
void write_files(const fs::path& dir, const Files& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
  for (const auto& [name, content] : files) {
    const auto target = dir / name;
    const auto temp = dir / (name + ".tmp");
    {
      std::ofstream f(temp, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(ErrorCode::Io, "cannot write " + temp.string());
      f << content;
      if (!f.flush()) throw Error(ErrorCode::Io, "cannot write " + temp.string());
    }
    fs::rename(temp, target, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move " + temp.string() + " into place");
  }
}

fs::path output_dir(const Options& o, const std::optional<Scenario>& s) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (s && s->output_directory) return *s->output_directory;
  return ".";
}

const Scenario& require_mode(const Scenario& s, Mode mode, const std::string& command) {
  if (s.mode != mode) {
    throw Error(ErrorCode::Validation,
                command + " needs a " + (mode == Mode::Game ? "game" : "single_agent") +
                    " scenario");
  }
  return s;
}

std::vector<double> parse_sweep(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || lo < 0.0 ||
      hi < lo || !in.eof()) {
    throw Error(ErrorCode::Validation, "--sweep expects lo:hi:n with 0 <= lo <= hi and n >= 1");
  }
  std::vector<double> out;
  for (long long j = 0; j < n; ++j) {
    out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1));
  }
  return out;
}

std::string gridset_summary(const GridSet& set, const Grid& grid) {
  if (set.empty()) return "empty";
  const bool contiguous = set.back() - set.front() + 1 == set.size();
  return fmt::format("{} points in [{}, {}]{}", set.size(), num(grid.point(set.front())),
                     num(grid.point(set.back())), contiguous ? "" : " (not contiguous)");
}

int consider(const Scenario& s, std::ostream& out, Files& files) {
  const auto& agent = s.agent();
  const auto maximal = maximal_set_grid(agent.utility, agent.c1, *s.x_s, s.grid);
  const auto interval = consideration_interval(agent.utility, agent.c1, *s.x_s);
  const auto on_grid = interval_on_grid(interval, s.grid);

  out << fmt::format("consideration interval   [{}, {}]\n", num(interval.lo), num(interval.hi));
  out << fmt::format("grid maximal set         {}\n", gridset_summary(maximal, s.grid));
  out << fmt::format("interval on grid         {}\n", gridset_summary(on_grid, s.grid));
  out << fmt::format("sets agree               {}\n", maximal == on_grid ? "yes" : "no");
  out << fmt::format("grid step                {}\n", num(s.grid.step()));

  CsvWriter csv({"x", "in_interval"});
  for (auto j : maximal) {
    const bool in = std::binary_search(on_grid.begin(), on_grid.end(), j);
    csv.row({num(s.grid.point(j)), in ? "1" : "0"});
  }
  files["consider.csv"] = csv.str();
  return kOk;
}

int choose(const Scenario& s, std::ostream& out, Files& files) {
  const auto& agent = s.agent();
  const auto choice = second_stage_choice(agent, *s.x_s, s.grid);
  const auto trap = detect_trap(agent, *s.x_s, s.grid);

  CsvWriter csv({"quantity", "value"});
  const auto put = [&](const std::string& name, double v) {
    csv.row({name, num(v)});
    out << fmt::format("{:<22} {}\n", name, num(v));
  };
  put("x_s", *s.x_s);
  put("belief_mean", expected_future_choice(agent));
  put("interval_lo", choice.interval.lo);
  put("interval_hi", choice.interval.hi);
  put("chosen", choice.representative());
  put("chosen_count", static_cast<double>(choice.chosen.size()));
  put("value", choice.value);
  put("x_hat", trap.x_hat);
  put("x_hat_count", static_cast<double>(trap.x_hat_multiplicity));
  put("trapped", trap.trapped ? 1.0 : 0.0);
  put("utility_gap", trap.utility_gap);
  put("grid_step", s.grid.step());
  files["choice.csv"] = csv.str();
  return kOk;
}

int certify(const Scenario& s, std::ostream& out, Files& files) {
  const auto cert = two_criteria_certificate(s.agent(), *s.x_s, s.grid);
  out << fmt::format("two sequential criteria  {}\n", cert.holds ? "holds" : "FAILS");
  out << fmt::format("stage-1 survivors        {}\n", gridset_summary(cert.stage1_survivors, s.grid));
  out << fmt::format("final choice             {}\n", gridset_summary(cert.gamma, s.grid));

  CsvWriter csv({"x", "in_gamma"});
  for (auto j : cert.stage1_survivors) {
    const bool in = std::binary_search(cert.gamma.begin(), cert.gamma.end(), j);
    csv.row({num(s.grid.point(j)), in ? "1" : "0"});
  }
  files["certificate.csv"] = csv.str();
  return cert.holds ? kOk : kPreconditionFailure;
}

int best_response_curve(const Scenario& s, const Options& o, std::ostream& out, Files& files) {
  const auto game = s.game();
  if (o.agent < 1 || o.agent > game.size()) {
    throw Error(ErrorCode::Validation, "--agent must be between 1 and the number of agents");
  }
  const std::size_t i = o.agent - 1;
  BestResponseMethod method;
  if (o.method == "grid") {
    method = BestResponseMethod::GridOracle;
  } else if (o.method == "exact") {
    method = BestResponseMethod::Exact;
  } else {
    throw Error(ErrorCode::Validation, "--method must be 'grid' or 'exact'");
  }
  if (o.deferral && method == BestResponseMethod::Exact) {
    throw Error(ErrorCode::Validation, "--deferral responses are grid-based");
  }

  CsvWriter csv({"opponent", "response", "response_max", "value"});
  for (double x : parse_sweep(o.sweep)) {
    const StrategyProfile profile{std::vector<double>(game.size(), x)};
    const auto br = o.deferral ? deferral_best_response(game, i, profile, s.grid)
                               : best_response(game, i, profile, s.grid, method);
    csv.row({num(x), num(br.points.front()), num(br.points.back()), num(br.value)});
  }
  const auto name = fmt::format("best_response_agent{}{}.csv", o.agent, o.deferral ? "_deferral" : "");
  out << csv.str();
  files[name] = csv.str();
  return kOk;
}

int equilibria(const Scenario& s, const Options& o, std::ostream& out, Files& files) {
  const auto game = s.game();
  const double tol = s.resolved_tolerance();
  const auto certs = o.deferral ? find_equilibria_after_deferral(game, s.grid, tol)
                                : find_equilibria(game, s.grid, tol);
  const auto csv = equilibria_csv(certs, game.size());

  out << fmt::format("{} ({} found, grid step {}, tolerance {})\n",
                     o.deferral ? "equilibria after deferral" : "equilibria", certs.size(),
                     num(s.grid.step()), num(tol));
  if (game.size() == 2) out << "  " << describe(extent(certs, s.grid)) << "\n";
  constexpr std::size_t kShown = 20;
  std::size_t shown = 0;
  for (const auto& c : certs) {
    if (shown++ == kShown) {
      out << fmt::format("  ... {} more in the CSV\n", certs.size() - kShown);
      break;
    }
    std::string row = " ";
    for (double x : c.profile.choices) row += " " + num(x);
    out << fmt::format("{}  {}  regret {}\n", row, to_string(c.kind), num(c.max_regret));
  }
  files[o.deferral ? "deferral_equilibria.csv" : "equilibria.csv"] = csv;
  return kOk;
}

int loss(const Scenario& s, const Options& o, std::ostream& out, std::ostream& err, Files& files) {
  const auto game = s.game();
  const double tol = s.resolved_tolerance();
  const auto p = load_profile(o.standard_path);
  const auto q = load_profile(o.deferred_path);
  if (p.size() != game.size() || q.size() != game.size()) {
    throw Error(ErrorCode::Validation, "profile length does not match the agent count");
  }
  const auto gap = welfare_gap(game, p, q);

  CsvWriter csv({"agent", "gap"});
  for (std::size_t i = 0; i < gap.per_agent_gaps.size(); ++i) {
    csv.row({std::to_string(i + 1), num(gap.per_agent_gaps[i])});
    out << fmt::format("agent {}  payoff gap {}\n", i + 1, num(gap.per_agent_gaps[i]));
  }
  csv.row({"total", num(gap.total)});
  out << fmt::format("total welfare gap {}\n", num(gap.total));
  files["loss.csv"] = csv.str();

  const auto classify = [&](const StrategyProfile& profile) {
    auto c = classify_profile(game, profile, s.grid, tol);
    return c.certificate ? *c.certificate : EquilibriumCertificate{profile, EquilibriumKind::Both, 0.0, {}};
  };
  try {
    const auto report = deferral_loss(game, classify(p), classify(q), s.grid, tol);
    out << fmt::format("deferral loss     {}\n", num(report.total));
    return kOk;
  } catch (const LossPreconditionError& e) {
    err << "deferral loss undefined: " << to_string(e.which()) << "\n";
    return kPreconditionFailure;
  }
}

int reproduce(const Options& o, std::ostream& out, Files& files) {
  CaseOutput result;
  if (o.case_name == "akerlof") {
    result = reproduce_akerlof(akerlof_case(o.steps.value_or(1600)));
  } else if (o.case_name == "example42") {
    result = reproduce_example42(example42_case(o.steps.value_or(3200)));
  } else if (o.case_name == "trap") {
    result = reproduce_trap(trap_case(o.steps.value_or(4000)), trap_contrast_case(o.steps.value_or(4000)));
  } else {
    throw Error(ErrorCode::Validation, "--case must be akerlof, example42 or trap");
  }
  out << result.summary;
  files.insert(result.files.begin(), result.files.end());
  files[o.case_name + "_report.txt"] = result.summary;
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PropOneUnavailable:
    case ErrorCode::MethodUnsupported:
    case ErrorCode::PreconditionViolated:
      return kPreconditionFailure;
    case ErrorCode::Io:
      return kIoFailure;
    default:
      return kValidationFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage fundamental choice under social pressure: consideration sets, "
               "deferred choice, and equilibria with and without deferral."};
  app.require_subcommand(1);
  Options o;

  const auto with_scenario = [&](CLI::App* sub) {
    sub->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", o.out_dir, "Output directory for CSV files");
  };
  auto* consider_cmd = app.add_subcommand("consider", "Consideration interval and grid maximal set");
  with_scenario(consider_cmd);
  auto* choose_cmd = app.add_subcommand("choose", "Second-stage choice, unconstrained optimum, trap");
  with_scenario(choose_cmd);
  auto* certify_cmd = app.add_subcommand("certify", "Two-sequential-criteria certificate");
  with_scenario(certify_cmd);
  auto* br_cmd = app.add_subcommand("best-response", "Best-response curve as CSV");
  with_scenario(br_cmd);
  br_cmd->add_option("--agent", o.agent, "Responding agent, 1-based")->required();
  br_cmd->add_option("--sweep", o.sweep, "Opponent values lo:hi:n")->required();
  br_cmd->add_option("--method", o.method, "grid or exact");
  br_cmd->add_flag("--deferral", o.deferral, "Restrict responses to the consideration set");
  auto* eq_cmd = app.add_subcommand("equilibria", "Equilibrium certificates as table and CSV");
  with_scenario(eq_cmd);
  eq_cmd->add_flag("--deferral", o.deferral, "Equilibria after deferral");
  auto* loss_cmd = app.add_subcommand("loss", "Welfare gap and guarded deferral loss");
  with_scenario(loss_cmd);
  loss_cmd->add_option("--standard", o.standard_path, "Profile JSON of the standard equilibrium")
      ->required();
  loss_cmd->add_option("--deferred", o.deferred_path, "Profile JSON of the deferred equilibrium")
      ->required();
  auto* repro_cmd = app.add_subcommand("reproduce", "Run a built-in worked example");
  repro_cmd->add_option("--case", o.case_name, "akerlof, example42 or trap")->required();
  repro_cmd->add_option("--out", o.out_dir, "Output directory");
  repro_cmd->add_option("--steps", o.steps, "Override the grid resolution");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kValidationFailure;
  }

  try {
    Files files;
    int code = kOk;
    std::optional<Scenario> scenario;
    if (!repro_cmd->parsed()) scenario = load_scenario(o.scenario_path);

    if (consider_cmd->parsed()) {
      code = consider(require_mode(*scenario, Mode::SingleAgent, "consider"), out, files);
    } else if (choose_cmd->parsed()) {
      code = choose(require_mode(*scenario, Mode::SingleAgent, "choose"), out, files);
    } else if (certify_cmd->parsed()) {
      code = certify(require_mode(*scenario, Mode::SingleAgent, "certify"), out, files);
    } else if (br_cmd->parsed()) {
      code = best_response_curve(require_mode(*scenario, Mode::Game, "best-response"), o, out, files);
    } else if (eq_cmd->parsed()) {
      code = equilibria(require_mode(*scenario, Mode::Game, "equilibria"), o, out, files);
    } else if (loss_cmd->parsed()) {
      code = loss(require_mode(*scenario, Mode::Game, "loss"), o, out, err, files);
    } else {
      code = reproduce(o, out, files);
    }
    write_files(output_dir(o, scenario), files);
    return code;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << e.what() << "\n";
    return kIoFailure;
  }
}

}  // namespace fundchoice::cli
