#include "scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fundchoice::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

void expect_keys(const json& obj, const std::string& where, const std::set<std::string>& required,
                 const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) invalid(where + ": expected an object");
  for (const auto& key : required) {
    if (!obj.contains(key)) invalid(where + ": missing key '" + key + "'");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) {
      invalid(where + ": unexpected key '" + key + "'");
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) invalid(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) invalid(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) invalid(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

UtilityFunction parse_utility(const json& v, const Grid& grid, const std::string& where) {
  if (!v.is_object() || !v.contains("type") || !v["type"].is_string()) {
    invalid(where + ": expected an object with a 'type'");
  }
  const auto type = v["type"].get<std::string>();
  if (type == "quadratic") {
    expect_keys(v, where, {"type", "a", "b", "k"});
    return Quadratic{number(v, "a", where), number(v, "b", where), number(v, "k", where)};
  }
  if (type == "tabulated") {
    expect_keys(v, where, {"type", "values"});
    return Tabulated{grid, numbers(v["values"], where + ".values")};
  }
  invalid(where + ": unknown utility type '" + type + "'");
}

CostFunction parse_cost(const json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("type") || !v["type"].is_string()) {
    invalid(where + ": expected an object with a 'type'");
  }
  const auto type = v["type"].get<std::string>();
  if (type == "zero") {
    expect_keys(v, where, {"type"});
    return ZeroCost{};
  }
  if (type == "linear") {
    expect_keys(v, where, {"type", "d"});
    return LinearCost{number(v, "d", where)};
  }
  if (type == "power") {
    expect_keys(v, where, {"type", "d", "p"});
    return PowerCost{number(v, "d", where), number(v, "p", where)};
  }
  invalid(where + ": unknown cost type '" + type + "'");
}

FiniteRandomVariable parse_belief(const json& v, const std::string& where) {
  if (!v.is_array()) invalid(where + ": expected [[value, probability], ...]");
  FiniteRandomVariable out;
  for (const auto& atom : v) {
    const auto pair = numbers(atom, where);
    if (pair.size() != 2) invalid(where + ": atoms are [value, probability] pairs");
    out.atoms.push_back({pair[0], pair[1]});
  }
  return out;
}

AgentSpec parse_agent(const json& v, const Grid& grid, const std::string& where) {
  expect_keys(v, where, {"utility", "c1", "c2", "beliefs"}, {"form"});
  AgentSpec agent;
  agent.utility = parse_utility(v["utility"], grid, where + ".utility");
  agent.c1 = parse_cost(v["c1"], where + ".c1");
  agent.c2 = parse_cost(v["c2"], where + ".c2");
  if (v.contains("form")) {
    const auto& f = v["form"];
    expect_keys(f, where + ".form", {"w_u", "w_1", "w_2"});
    agent.form = {number(f, "w_u", where), number(f, "w_1", where), number(f, "w_2", where)};
  }
  if (!v["beliefs"].is_array()) invalid(where + ".beliefs: expected a list of beliefs");
  for (std::size_t b = 0; b < v["beliefs"].size(); ++b) {
    agent.beliefs.push_back(
        parse_belief(v["beliefs"][b], where + ".beliefs[" + std::to_string(b) + "]"));
  }
  return agent;
}

std::string describe(const Violations& violations) {
  std::string msg;
  for (const auto& v : violations) {
    if (!msg.empty()) msg += ", ";
    msg += std::string(to_string(v.code)) + " at " + v.where;
  }
  return msg;
}

json utility_json(const UtilityFunction& u) {
  if (const auto* q = std::get_if<Quadratic>(&u)) {
    return {{"type", "quadratic"}, {"a", q->a}, {"b", q->b}, {"k", q->k}};
  }
  return {{"type", "tabulated"}, {"values", std::get<Tabulated>(u).values}};
}

json cost_json(const CostFunction& c) {
  if (const auto* lin = std::get_if<LinearCost>(&c)) return {{"type", "linear"}, {"d", lin->d}};
  if (const auto* pw = std::get_if<PowerCost>(&c)) {
    return {{"type", "power"}, {"d", pw->d}, {"p", pw->p}};
  }
  return {{"type", "zero"}};
}

}  // namespace

GameSpec Scenario::game() const {
  return GameSpec{agents, choice_aggregator, belief_aggregator, grid.x_max};
}

double Scenario::resolved_tolerance() const {
  if (tolerance) return *tolerance;
  if (mode == Mode::Game) return default_tolerance(game(), grid);
  return kValueTieTolerance;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  expect_keys(root, "scenario", {"mode", "agents", "grid"},
              {"x_s", "tolerance", "choice_aggregator", "belief_aggregator", "output"});

  Scenario s;
  const auto& mode = root["mode"];
  if (mode == "single_agent") {
    s.mode = Mode::SingleAgent;
  } else if (mode == "game") {
    s.mode = Mode::Game;
  } else {
    invalid("scenario.mode: expected 'single_agent' or 'game'");
  }

  const auto& g = root["grid"];
  expect_keys(g, "scenario.grid", {"x_max"}, {"steps"});
  s.grid.x_max = number(g, "x_max", "scenario.grid");
  if (g.contains("steps")) {
    if (!g["steps"].is_number_integer() || g["steps"].get<long long>() <= 0) {
      invalid("scenario.grid.steps: expected a positive integer");
    }
    s.grid.steps = g["steps"].get<std::size_t>();
  }
  if (const auto v = validate(s.grid); !v.empty()) invalid("scenario.grid: " + describe(v));

  if (!root["agents"].is_array()) invalid("scenario.agents: expected a list");
  for (std::size_t i = 0; i < root["agents"].size(); ++i) {
    s.agents.push_back(parse_agent(root["agents"][i], s.grid, "agents[" + std::to_string(i) + "]"));
  }

  if (root.contains("tolerance")) {
    s.tolerance = number(root, "tolerance", "scenario");
    if (!(*s.tolerance >= 0.0)) invalid("scenario.tolerance: must be nonnegative");
  }
  if (root.contains("output")) {
    expect_keys(root["output"], "scenario.output", {"directory"});
    if (!root["output"]["directory"].is_string()) invalid("scenario.output.directory: string");
    s.output_directory = root["output"]["directory"].get<std::string>();
  }

  if (s.mode == Mode::SingleAgent) {
    if (!root.contains("x_s")) invalid("scenario: single_agent mode requires 'x_s'");
    if (root.contains("choice_aggregator") || root.contains("belief_aggregator")) {
      invalid("scenario: aggregators are only valid in game mode");
    }
    if (s.agents.size() != 1) invalid("scenario: single_agent mode takes exactly one agent");
    s.x_s = number(root, "x_s", "scenario");
    if (*s.x_s < 0.0) invalid("scenario.x_s: must be nonnegative");
    if (const auto v = validate(s.agents.front()); !v.empty()) {
      invalid("agents[0]: " + describe(v));
    }
    return s;
  }

  if (root.contains("x_s")) invalid("scenario: 'x_s' is only valid in single_agent mode");
  if (root.contains("choice_aggregator")) {
    const auto& a = root["choice_aggregator"];
    if (!a.is_object() || !a.contains("type")) invalid("scenario.choice_aggregator: needs 'type'");
    if (a["type"] == "mean") {
      expect_keys(a, "scenario.choice_aggregator", {"type"});
    } else if (a["type"] == "weighted") {
      expect_keys(a, "scenario.choice_aggregator", {"type", "weights"});
      s.choice_aggregator = WeightedAggregator{numbers(a["weights"], "choice_aggregator.weights")};
    } else {
      invalid("scenario.choice_aggregator: unknown type");
    }
  }
  if (root.contains("belief_aggregator")) {
    const auto& a = root["belief_aggregator"];
    expect_keys(a, "scenario.belief_aggregator", {"weights"});
    if (!a["weights"].is_array()) invalid("scenario.belief_aggregator.weights: expected a list");
    for (const auto& row : a["weights"]) {
      s.belief_aggregator.weights.push_back(numbers(row, "belief_aggregator.weights"));
    }
  }
  if (const auto v = validate(s.game()); !v.empty()) invalid("game: " + describe(v));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

StrategyProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read profile file " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed profile JSON: ") + e.what());
  }
  expect_keys(root, "profile file", {"profile"});
  return StrategyProfile{numbers(root["profile"], "profile")};
}

std::string dump_scenario(const Scenario& s) {
  json root;
  root["mode"] = s.mode == Mode::Game ? "game" : "single_agent";
  root["grid"] = {{"x_max", s.grid.x_max}, {"steps", s.grid.steps}};
  if (s.x_s) root["x_s"] = *s.x_s;
  if (s.tolerance) root["tolerance"] = *s.tolerance;
  json agents = json::array();
  for (const auto& a : s.agents) {
    json beliefs = json::array();
    for (const auto& b : a.beliefs) {
      json atoms = json::array();
      for (const auto& atom : b.atoms) atoms.push_back({atom.value, atom.probability});
      beliefs.push_back(atoms);
    }
    agents.push_back({{"utility", utility_json(a.utility)},
                      {"c1", cost_json(a.c1)},
                      {"c2", cost_json(a.c2)},
                      {"form", {{"w_u", a.form.w_u}, {"w_1", a.form.w_1}, {"w_2", a.form.w_2}}},
                      {"beliefs", beliefs}});
  }
  root["agents"] = agents;
  if (s.mode == Mode::Game) {
    if (const auto* w = std::get_if<WeightedAggregator>(&s.choice_aggregator)) {
      root["choice_aggregator"] = {{"type", "weighted"}, {"weights", w->weights}};
    } else {
      root["choice_aggregator"] = {{"type", "mean"}};
    }
    if (!s.belief_aggregator.weights.empty()) {
      root["belief_aggregator"] = {{"weights", s.belief_aggregator.weights}};
    }
  }
  if (s.output_directory) root["output"] = {{"directory", *s.output_directory}};
  return root.dump(2) + "\n";
}

}  // namespace fundchoice::cli
