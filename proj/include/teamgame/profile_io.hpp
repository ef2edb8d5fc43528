#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "teamgame/model.hpp"

namespace teamgame {

/// Doubles in emitted documents are rounded to 12 significant digits.
double round_12(double value);
nlohmann::ordered_json json_number(double value);

/// Serializes a profile with explicit index labels per row:
/// [type reports, actions, winnings, rewards, z]. Deterministic row order,
/// so equal profiles produce byte-identical documents.
nlohmann::ordered_json profile_to_json(const GameSpec& spec,
                                       const std::vector<MechanismZ>& profile);
std::vector<MechanismZ> profile_from_json(const GameSpec& spec, const nlohmann::json& document);

void save_profile(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                  const std::string& path);
std::vector<MechanismZ> load_profile(const GameSpec& spec, const std::string& path);

/// One CSV per team: columns t', a', w, r, z.
void write_profile_csv(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                       const std::string& directory, const std::string& stem);

}  // namespace teamgame
