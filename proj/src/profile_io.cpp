#include "teamgame/profile_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace teamgame {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> block_labels(const FiniteSpace& space, int members, int block) {
  std::vector<std::string> out(members);
  for (int i = members - 1; i >= 0; --i) {
    out[i] = space.labels[block % space.size()];
    block /= space.size();
  }
  return out;
}

int block_from_labels(const FiniteSpace& space, const json& labels, int members,
                      const std::string& where) {
  if (!labels.is_array() || labels.size() != static_cast<std::size_t>(members)) {
    throw std::invalid_argument(where + ": expected one label per member");
  }
  int block = 0;
  for (const auto& entry : labels) {
    const std::string label = entry.get<std::string>();
    const auto it = std::find(space.labels.begin(), space.labels.end(), label);
    if (it == space.labels.end()) {
      throw std::invalid_argument(where + ": unknown label '" + label + "'");
    }
    block = block * space.size() + static_cast<int>(it - space.labels.begin());
  }
  return block;
}

}  // namespace

double round_12(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return std::strtod(buffer, nullptr);
}

ordered_json json_number(double value) {
  return ordered_json(round_12(value));
}

ordered_json profile_to_json(const GameSpec& spec, const std::vector<MechanismZ>& profile) {
  ordered_json document;
  document["format"] = "teamgame-profile";
  document["version"] = 1;
  document["columns"] = {"type_reports", "actions", "winnings", "rewards", "z"};
  ordered_json teams = ordered_json::array();
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  for (const MechanismZ& m : profile) {
    ordered_json team;
    team["team"] = m.team;
    ordered_json rows = ordered_json::array();
    for (std::size_t t = 0; t < tn; ++t) {
      for (std::size_t a = 0; a < an; ++a) {
        for (std::size_t w = 0; w < wn; ++w) {
          for (std::size_t r = 0; r < rn; ++r) {
            ordered_json row = ordered_json::array();
            row.push_back(block_labels(spec.type_space, spec.members, static_cast<int>(t)));
            row.push_back(block_labels(spec.action_space, spec.members, static_cast<int>(a)));
            row.push_back(spec.winnings_space.labels[w]);
            row.push_back(block_labels(spec.reward_space, spec.members, static_cast<int>(r)));
            row.push_back(json_number(m.at(spec, t, a, w, r)));
            rows.push_back(std::move(row));
          }
        }
      }
    }
    team["rows"] = std::move(rows);
    teams.push_back(std::move(team));
  }
  document["teams"] = std::move(teams);
  return document;
}

std::vector<MechanismZ> profile_from_json(const GameSpec& spec, const json& document) {
  if (!document.is_object() || document.value("format", "") != "teamgame-profile") {
    throw std::invalid_argument("profile document: missing 'teamgame-profile' format marker");
  }
  const auto teams_it = document.find("teams");
  if (teams_it == document.end() || !teams_it->is_array() ||
      teams_it->size() != static_cast<std::size_t>(spec.teams)) {
    throw std::invalid_argument("profile document: expected one entry per team");
  }
  std::vector<MechanismZ> profile(spec.teams);
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  std::vector<char> seen_team(spec.teams, 0);
  for (const auto& team_doc : *teams_it) {
    const int team = team_doc.at("team").get<int>();
    if (team < 0 || team >= spec.teams || seen_team[team]) {
      throw std::invalid_argument("profile document: bad or duplicate team id");
    }
    seen_team[team] = 1;
    MechanismZ m;
    m.team = team;
    m.z.assign(spec.z_index().size(), 0.0);
    const auto& rows = team_doc.at("rows");
    if (!rows.is_array() || rows.size() != m.z.size()) {
      throw std::invalid_argument("profile document: wrong row count for team " +
                                  std::to_string(team));
    }
    std::vector<char> seen_cell(m.z.size(), 0);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 5) {
        throw std::invalid_argument("profile document: each row needs 5 columns");
      }
      const int t = block_from_labels(spec.type_space, row[0], spec.members, "type_reports");
      const int a = block_from_labels(spec.action_space, row[1], spec.members, "actions");
      const std::string wlabel = row[2].get<std::string>();
      const auto wit = std::find(spec.winnings_space.labels.begin(),
                                 spec.winnings_space.labels.end(), wlabel);
      if (wit == spec.winnings_space.labels.end()) {
        throw std::invalid_argument("profile document: unknown winnings label '" + wlabel + "'");
      }
      const int w = static_cast<int>(wit - spec.winnings_space.labels.begin());
      const int r = block_from_labels(spec.reward_space, row[3], spec.members, "rewards");
      const double value = row[4].get<double>();
      const std::size_t cell = ((static_cast<std::size_t>(t) * an + a) * wn + w) * rn + r;
      if (seen_cell[cell]) {
        throw std::invalid_argument("profile document: duplicate row for one table cell");
      }
      seen_cell[cell] = 1;
      m.z[cell] = value;
    }
    profile[team] = std::move(m);
  }
  return profile;
}

void save_profile(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file '" + path + "'");
  out << profile_to_json(spec, profile).dump(2) << '\n';
}

std::vector<MechanismZ> load_profile(const GameSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile file '" + path + "'");
  json document;
  try {
    in >> document;
  } catch (const json::exception& e) {
    throw std::invalid_argument("profile file '" + path + "' is not valid JSON: " + e.what());
  }
  return profile_from_json(spec, document);
}

void write_profile_csv(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                       const std::string& directory, const std::string& stem) {
  std::filesystem::create_directories(directory);
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  for (const MechanismZ& m : profile) {
    const std::string path =
        directory + "/" + stem + "_team" + std::to_string(m.team) + ".csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
    out << "type_reports,actions,winnings,rewards,z\n";
    char buffer[48];
    auto join = [&](const std::vector<std::string>& labels) {
      std::string joined;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) joined += '|';
        joined += labels[i];
      }
      return joined;
    };
    for (std::size_t t = 0; t < tn; ++t) {
      for (std::size_t a = 0; a < an; ++a) {
        for (std::size_t w = 0; w < wn; ++w) {
          for (std::size_t r = 0; r < rn; ++r) {
            std::snprintf(buffer, sizeof(buffer), "%.12g", m.at(spec, t, a, w, r));
            out << join(block_labels(spec.type_space, spec.members, static_cast<int>(t))) << ','
                << join(block_labels(spec.action_space, spec.members, static_cast<int>(a))) << ','
                << spec.winnings_space.labels[w] << ','
                << join(block_labels(spec.reward_space, spec.members, static_cast<int>(r))) << ','
                << buffer << '\n';
          }
        }
      }
    }
  }
}

}  // namespace teamgame
