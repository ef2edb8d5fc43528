#include "teamgame/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "teamgame/scenarios.hpp"

namespace teamgame {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw config_error("config field '" + where + "': " + what);
}

const json& field(const json& doc, const std::string& where, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) bad(where + "." + key, "missing");
  return *it;
}

double number_at(const json& doc, const std::string& where, const char* key) {
  const json& v = field(doc, where, key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  return v.get<double>();
}

int int_at(const json& doc, const std::string& where, const char* key) {
  const json& v = field(doc, where, key);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  return v.get<int>();
}

double number_or(const json& doc, const char* key, double fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number()) bad(key, "expected a number");
  return it->get<double>();
}

int int_or(const json& doc, const char* key, int fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number_integer()) bad(key, "expected an integer");
  return it->get<int>();
}

FiniteSpace parse_space(const json& doc, const std::string& where, const std::string& name) {
  if (!doc.is_object()) bad(where, "expected an object");
  const std::string kind = field(doc, where, "kind").get<std::string>();
  if (kind == "categorical") {
    const json& labels = field(doc, where, "labels");
    if (!labels.is_array() || labels.empty()) bad(where + ".labels", "expected a nonempty array");
    return FiniteSpace::categorical(name, labels.get<std::vector<std::string>>());
  }
  if (kind == "grid") {
    const double lo = number_at(doc, where, "lo");
    const double hi = number_at(doc, where, "hi");
    const int points = int_at(doc, where, "points");
    if (points < 1) bad(where + ".points", "expected at least one point");
    std::vector<double> values;
    for (int k = 0; k < points; ++k) {
      values.push_back(points == 1 ? lo : lo + (hi - lo) * k / static_cast<double>(points - 1));
    }
    return FiniteSpace::numeric_grid(name, values);
  }
  if (kind == "values") {
    const json& values = field(doc, where, "values");
    if (!values.is_array() || values.empty()) bad(where + ".values", "expected a nonempty array");
    return FiniteSpace::numeric_grid(name, values.get<std::vector<double>>());
  }
  bad(where + ".kind", "expected 'categorical', 'grid' or 'values'");
}

std::vector<double> parse_table(const json& doc, const std::string& where, std::size_t expected) {
  if (!doc.is_array()) bad(where, "expected an array");
  std::vector<double> out;
  out.reserve(doc.size());
  for (const auto& v : doc) {
    if (!v.is_number()) bad(where, "expected numbers");
    out.push_back(v.get<double>());
  }
  if (out.size() != expected) {
    bad(where, "expected " + std::to_string(expected) + " entries, got " +
                   std::to_string(out.size()));
  }
  return out;
}

ContestParams parse_contest_params(const json& doc) {
  ContestParams params;
  if (auto it = doc.find("params"); it != doc.end()) {
    const json& p = *it;
    params.teams = int_or(p, "teams", params.teams);
    params.members = int_or(p, "members", params.members);
    if (auto g = p.find("type_grid"); g != p.end()) {
      params.type_lo = number_at(*g, "params.type_grid", "lo");
      params.type_hi = number_at(*g, "params.type_grid", "hi");
      params.type_points = int_at(*g, "params.type_grid", "points");
    }
    if (auto g = p.find("action_grid"); g != p.end()) {
      params.action_lo = number_at(*g, "params.action_grid", "lo");
      params.action_hi = number_at(*g, "params.action_grid", "hi");
      params.action_points = int_at(*g, "params.action_grid", "points");
    }
    params.cost = number_or(p, "cost", params.cost);
    params.reward_divisions = int_or(p, "reward_divisions", params.reward_divisions);
  }
  return params;
}

GameSpec parse_explicit(const json& doc) {
  GameSpec spec;
  spec.teams = int_at(doc, "", "teams");
  spec.members = int_at(doc, "", "members");
  if (spec.teams < 1 || spec.members < 1) bad("teams/members", "must be positive");

  const json& spaces = field(doc, "", "spaces");
  spec.type_space = parse_space(field(spaces, "spaces", "types"), "spaces.types", "T");
  spec.action_space = parse_space(field(spaces, "spaces", "actions"), "spaces.actions", "A");
  spec.winnings_space = parse_space(field(spaces, "spaces", "winnings"), "spaces.winnings", "W");
  spec.reward_space = parse_space(field(spaces, "spaces", "rewards"), "spaces.rewards", "R");

  const json& mode = field(doc, "", "mode");
  spec.obedience_enforced = field(mode, "mode", "obedience_enforced").get<bool>();
  spec.finalize();

  // prior
  const json& prior = field(doc, "", "prior");
  if (prior.is_string() && prior.get<std::string>() == "independent_uniform") {
    const std::size_t cells = spec.full_type_count();
    spec.prior.mass.assign(cells, 1.0 / static_cast<double>(cells));
    double assigned = 0.0;
    for (std::size_t t = 0; t + 1 < cells; ++t) assigned += spec.prior.mass[t];
    spec.prior.mass[cells - 1] = 1.0 - assigned;
  } else if (prior.is_object()) {
    spec.prior.mass = parse_table(field(prior, "prior", "table"), "prior.table",
                                  spec.full_type_count());
  } else {
    bad("prior", "expected 'independent_uniform' or an object with a table");
  }

  // winnings kernel
  const json& winnings = field(doc, "", "winnings");
  const std::size_t wrows = spec.full_type_count() * spec.full_action_count();
  if (winnings.contains("table")) {
    const json& table = winnings["table"];
    if (!table.is_array() || table.size() != wrows) {
      bad("winnings.table", "expected one row per (type profile, action profile)");
    }
    spec.winnings = Kernel::zeros(ProductIndex({static_cast<int>(spec.full_type_count()),
                                                static_cast<int>(spec.full_action_count())}),
                                  spec.winnings_profile_count());
    for (std::size_t row = 0; row < wrows; ++row) {
      const auto values = parse_table(table[row], "winnings.table[" + std::to_string(row) + "]",
                                      spec.winnings_profile_count());
      for (std::size_t w = 0; w < values.size(); ++w) spec.winnings.at(row, w) = values[w];
    }
  } else if (winnings.contains("model") && winnings["model"] == "tullock") {
    ContestParams params = parse_contest_params(doc);
    params.teams = spec.teams;
    params.members = spec.members;
    spec.winnings = tullock_winnings(params, spec);
  } else {
    bad("winnings", "expected a table or the 'tullock' model");
  }

  // feasible rewards
  const json& rewards = field(doc, "", "rewards");
  const ProductIndex team_rewards(
      std::vector<int>(spec.members, spec.reward_space.size()));
  if (rewards.contains("sets")) {
    const json& sets = rewards["sets"];
    if (!sets.is_array() || sets.size() != static_cast<std::size_t>(spec.winnings_space.size())) {
      bad("rewards.sets", "expected one set per winnings point");
    }
    spec.feasible_rewards.resize(spec.winnings_space.size());
    for (int w = 0; w < spec.winnings_space.size(); ++w) {
      for (const auto& tuple : sets[w]) {
        if (!tuple.is_array() || tuple.size() != static_cast<std::size_t>(spec.members)) {
          bad("rewards.sets", "each entry must list one reward label per member");
        }
        std::vector<int> ids(spec.members);
        for (int i = 0; i < spec.members; ++i) {
          const std::string label = tuple[i].get<std::string>();
          const auto& labels = spec.reward_space.labels;
          const auto it = std::find(labels.begin(), labels.end(), label);
          if (it == labels.end()) bad("rewards.sets", "unknown reward label '" + label + "'");
          ids[i] = static_cast<int>(it - labels.begin());
        }
        spec.feasible_rewards[w].push_back(static_cast<int>(team_rewards.flatten(ids)));
      }
      auto& set = spec.feasible_rewards[w];
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
    }
  } else if (rewards.contains("rule")) {
    const std::string rule = rewards["rule"].get<std::string>();
    if (spec.reward_space.values.empty() || spec.winnings_space.values.empty()) {
      bad("rewards.rule", "reward rules need numeric winnings and reward spaces");
    }
    spec.feasible_rewards.assign(spec.winnings_space.size(), {});
    std::vector<int> tuple(spec.members);
    for (int w = 0; w < spec.winnings_space.size(); ++w) {
      const double budget = spec.winnings_space.values[w];
      for (std::size_t r = 0; r < team_rewards.size(); ++r) {
        team_rewards.unflatten(r, tuple);
        if (rule == "budget") {
          double total = 0.0;
          for (int i = 0; i < spec.members; ++i) total += spec.reward_space.values[tuple[i]];
          if (total <= budget + 1e-12) spec.feasible_rewards[w].push_back(static_cast<int>(r));
        } else if (rule == "public_good") {
          bool equal = true;
          for (int i = 0; i < spec.members; ++i) {
            if (std::fabs(spec.reward_space.values[tuple[i]] - budget) > 1e-12) equal = false;
          }
          if (equal) spec.feasible_rewards[w].push_back(static_cast<int>(r));
        } else {
          bad("rewards.rule", "expected 'budget' or 'public_good'");
        }
      }
    }
  } else {
    bad("rewards", "expected explicit sets or a rule");
  }

  // utilities
  const json& utilities = field(doc, "", "utilities");
  if (utilities.contains("member_tables")) {
    const json& member_tables = utilities["member_tables"];
    const json& principal_tables = field(utilities, "utilities", "principal_tables");
    if (!member_tables.is_array() ||
        member_tables.size() != static_cast<std::size_t>(spec.agent_count())) {
      bad("utilities.member_tables", "expected one table per agent");
    }
    if (!principal_tables.is_array() ||
        principal_tables.size() != static_cast<std::size_t>(spec.teams)) {
      bad("utilities.principal_tables", "expected one table per team");
    }
    for (int a = 0; a < spec.agent_count(); ++a) {
      spec.member_utility.push_back(parse_table(
          member_tables[a], "utilities.member_tables[" + std::to_string(a) + "]",
          spec.member_table_index().size()));
    }
    for (int j = 0; j < spec.teams; ++j) {
      spec.principal_utility.push_back(parse_table(
          principal_tables[j], "utilities.principal_tables[" + std::to_string(j) + "]",
          spec.principal_table_index().size()));
    }
  } else if (utilities.contains("rule") && utilities["rule"] == "linear_cost") {
    if (spec.type_space.values.empty() || spec.action_space.values.empty() ||
        spec.reward_space.values.empty() || spec.winnings_space.values.empty()) {
      bad("utilities.rule", "linear_cost needs numeric spaces");
    }
    const double cost = number_at(utilities, "utilities", "cost");
    const std::size_t tc = spec.full_type_count();
    const std::size_t ac = spec.full_action_count();
    const std::size_t wc = spec.winnings_profile_count();
    const std::size_t rc = spec.team_reward_count();
    spec.member_utility.assign(spec.agent_count(),
                               std::vector<double>(spec.member_table_index().size(), 0.0));
    spec.principal_utility.assign(spec.teams,
                                  std::vector<double>(spec.principal_table_index().size(), 0.0));
    std::vector<int> rtuple(spec.members);
    for (std::size_t t = 0; t < tc; ++t) {
      for (std::size_t a = 0; a < ac; ++a) {
        for (std::size_t w = 0; w < wc; ++w) {
          for (int j = 0; j < spec.teams; ++j) {
            spec.principal_utility[j][(t * ac + a) * wc + w] =
                spec.winnings_space.values[spec.winnings_component(w, j)];
          }
          for (std::size_t r = 0; r < rc; ++r) {
            team_rewards.unflatten(r, rtuple);
            for (int j = 0; j < spec.teams; ++j) {
              for (int i = 0; i < spec.members; ++i) {
                const int agent = spec.agent_id(j, i);
                const double tv = spec.type_space.values[spec.agent_type(t, agent)];
                const double av = spec.action_space.values[spec.agent_action(a, agent)];
                spec.member_utility[agent][((t * ac + a) * wc + w) * rc + r] =
                    spec.reward_space.values[rtuple[i]] - cost * av / tv;
              }
            }
          }
        }
      }
    }
  } else {
    bad("utilities", "expected explicit tables or the 'linear_cost' rule");
  }

  return spec;
}

DynamicsOptions parse_solver(const json& doc) {
  DynamicsOptions options;
  auto it = doc.find("solver");
  if (it == doc.end()) return options;
  const json& solver = *it;
  if (auto s = solver.find("schedule"); s != solver.end()) {
    const std::string name = s->get<std::string>();
    if (name == "alternating") {
      options.schedule = Schedule::alternating;
    } else if (name == "simultaneous") {
      options.schedule = Schedule::simultaneous;
    } else {
      bad("solver.schedule", "expected 'alternating' or 'simultaneous'");
    }
  }
  options.damping = number_or(solver, "damping", options.damping);
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    bad("solver.damping", "must lie in (0, 1]");
  }
  options.max_rounds = int_or(solver, "max_rounds", options.max_rounds);
  options.tol = number_or(solver, "tol", options.tol);
  options.verify_tol = number_or(solver, "verify_tol", options.verify_tol);
  options.cycle_rounding = number_or(solver, "cycle_rounding", options.cycle_rounding);
  return options;
}

}  // namespace

ScenarioConfig load_scenario(const nlohmann::json& document) {
  if (!document.is_object()) throw config_error("config root: expected an object");
  ScenarioConfig config;
  auto it = document.find("model");
  if (it == document.end() || !it->is_string()) {
    throw config_error("config field 'model': missing or not a string");
  }
  config.model = it->get<std::string>();
  if (config.model == "myerson") {
    config.spec = myerson_scenario();
  } else if (config.model == "tullock_contest") {
    config.spec = contest_scenario(parse_contest_params(document));
  } else if (config.model == "explicit") {
    config.spec = parse_explicit(document);
  } else {
    throw config_error("config field 'model': unknown model '" + config.model + "'");
  }
  config.solver = parse_solver(document);
  return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return load_scenario(document);
}

}  // namespace teamgame
