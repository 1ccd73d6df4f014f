#pragma once

// Scenario files: UTF-8 JSON, snake_case keys mirroring the model types.
// See docs/scenario-format.md for the schema.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fundchoice/game.hpp"
#include "fundchoice/model.hpp"

namespace fundchoice::cli {

enum class Mode { SingleAgent, Game };

struct Scenario {
  Mode mode = Mode::SingleAgent;
  std::vector<AgentSpec> agents;
  std::optional<double> x_s;  // single-agent only
  Grid grid;
  ChoiceAggregator choice_aggregator = MeanAggregator{};
  BeliefMixture belief_aggregator;
  std::optional<double> tolerance;
  std::optional<std::string> output_directory;

  GameSpec game() const;
  const AgentSpec& agent() const { return agents.front(); }
  /// Scenario tolerance, else the game's default.
  double resolved_tolerance() const;
};

/// Parses and validates scenario JSON text. Throws Error(Validation).
Scenario parse_scenario(const std::string& text);

/// Reads a scenario file. Throws Error(Io) when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Reads {"profile": [x_1, ..., x_n]}.
StrategyProfile load_profile(const std::filesystem::path& path);

/// Serializes a scenario back to JSON (used to ship the built-in cases).
std::string dump_scenario(const Scenario& scenario);

}  // namespace fundchoice::cli
