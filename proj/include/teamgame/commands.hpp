#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "teamgame/config.hpp"

namespace teamgame {

/// Exit codes shared by every command: 0 success, 2 validation failure,
/// 3 solver failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::ordered_json output;
};

struct CommandIo {
  std::optional<std::string> csv_dir;       // write table CSVs here when set
  std::optional<std::string> out_profile;   // write the resulting profile here when set
};

CommandResult cmd_validate(const ScenarioConfig& config);
CommandResult cmd_best_response(const ScenarioConfig& config, int team,
                                const std::string& given_profile_path, const CommandIo& io);
CommandResult cmd_dynamics(const ScenarioConfig& config, const std::string& init,
                           const CommandIo& io);
CommandResult cmd_verify(const ScenarioConfig& config, const std::string& profile_path);
CommandResult cmd_ic_slack(const ScenarioConfig& config, const std::string& profile_path);
CommandResult cmd_distance(const ScenarioConfig& config, const std::string& profile_a,
                           const std::string& profile_b);

/// Initial profile from a preset name ("uniform", "C_C") or a profile file.
std::vector<MechanismZ> resolve_init_profile(const ScenarioConfig& config,
                                             const std::string& init);

}  // namespace teamgame
