#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "teamgame/model.hpp"
#include "teamgame/solver.hpp"

namespace teamgame {

/// Configuration problems carry the offending field path in the message.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parsed scenario: the game itself plus solver settings. Built either from
/// a named model ("myerson", "tullock_contest") or from explicit tables
/// ("explicit").
struct ScenarioConfig {
  std::string model;
  GameSpec spec;
  DynamicsOptions solver;
};

ScenarioConfig load_scenario(const nlohmann::json& document);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace teamgame
