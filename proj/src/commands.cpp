#include "teamgame/commands.hpp"

#include <cmath>

#include "teamgame/laws.hpp"
#include "teamgame/metrics.hpp"
#include "teamgame/profile_io.hpp"
#include "teamgame/scenarios.hpp"

namespace teamgame {

namespace {

using nlohmann::ordered_json;

ordered_json values_json(const std::vector<double>& values) {
  ordered_json out = ordered_json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

void attach_outputs(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                    const CommandIo& io, const std::string& stem) {
  if (io.out_profile) save_profile(spec, profile, *io.out_profile);
  if (io.csv_dir) write_profile_csv(spec, profile, *io.csv_dir, stem);
}

// every command except validate refuses a scenario that fails its own checks
void require_valid(const ScenarioConfig& config) {
  SpecReport report = check_spec(config.spec);
  if (!report.ok) {
    throw config_error("scenario fails validation: " + report.violations.front().rule + " (" +
                       report.violations.front().detail + ")");
  }
}

}  // namespace

std::vector<MechanismZ> resolve_init_profile(const ScenarioConfig& config,
                                             const std::string& init) {
  const GameSpec& spec = config.spec;
  if (init == "uniform") {
    std::vector<MechanismZ> profile;
    for (int j = 0; j < spec.teams; ++j) profile.push_back(uniform_mechanism(spec, j));
    return profile;
  }
  if (init == "C_C") {
    if (config.model != "myerson") {
      throw config_error("init preset 'C_C' only applies to the myerson model");
    }
    std::vector<MechanismZ> profile;
    for (int j = 0; j < spec.teams; ++j) profile.push_back(myerson::c_always(spec, j));
    return profile;
  }
  return load_profile(spec, init);
}

CommandResult cmd_validate(const ScenarioConfig& config) {
  CommandResult result;
  SpecReport report = check_spec(config.spec);
  result.output["command"] = "validate";
  result.output["model"] = config.model;
  result.output["ok"] = report.ok;
  ordered_json violations = ordered_json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
  }
  result.output["violations"] = std::move(violations);
  ordered_json assumptions;
  for (const auto& rule : report.vacuous_rules) assumptions[rule] = "satisfied by finiteness";
  result.output["assumptions"] = std::move(assumptions);
  result.output["sizes"] = {
      {"teams", config.spec.teams},
      {"members", config.spec.members},
      {"types", config.spec.type_space.size()},
      {"actions", config.spec.action_space.size()},
      {"winnings", config.spec.winnings_space.size()},
      {"rewards", config.spec.reward_space.size()},
      {"outcome_cells", config.spec.outcome_index().size()},
      {"mechanism_cells", config.spec.z_index().size()},
  };
  result.exit_code = report.ok ? kExitOk : kExitValidation;
  return result;
}

CommandResult cmd_best_response(const ScenarioConfig& config, int team,
                                const std::string& given_profile_path, const CommandIo& io) {
  CommandResult result;
  require_valid(config);
  const GameSpec& spec = config.spec;
  if (team < 0 || team >= spec.teams) {
    throw config_error("best-response team outside the scenario");
  }
  std::vector<MechanismZ> profile = resolve_init_profile(config, given_profile_path);
  const bool feasible = ic_feasible(spec, profile, team);
  result.output["command"] = "best_response";
  result.output["team"] = team;
  result.output["ic_feasible"] = feasible;
  BestResponse br = best_response(spec, profile, team);
  profile[team] = br.mechanism;
  result.output["value"] = json_number(br.value);
  result.output["profile"] = profile_to_json(spec, profile);
  attach_outputs(spec, profile, io, "best_response");
  return result;
}

CommandResult cmd_dynamics(const ScenarioConfig& config, const std::string& init,
                           const CommandIo& io) {
  CommandResult result;
  require_valid(config);
  const GameSpec& spec = config.spec;
  std::vector<MechanismZ> profile = resolve_init_profile(config, init);
  DynamicsResult dynamics = best_response_dynamics(spec, std::move(profile), config.solver);
  result.output["command"] = "dynamics";
  if (dynamics.cycle) {
    const CycleCertificate& cycle = *dynamics.cycle;
    result.output["outcome"] = "cycle";
    ordered_json doc;
    doc["period"] = cycle.period;
    doc["match_tol"] = json_number(cycle.match_tol);
    ordered_json steps = ordered_json::array();
    for (int k = 0; k < cycle.period; ++k) {
      ordered_json step;
      step["mover"] = cycle.movers[k];
      step["best_response_values"] = values_json(cycle.step_values[k]);
      step["profile"] = profile_to_json(spec, cycle.profiles[k]);
      steps.push_back(std::move(step));
    }
    doc["steps"] = std::move(steps);
    result.output["cycle"] = std::move(doc);
    attach_outputs(spec, cycle.profiles.front(), io, "cycle_start");
  } else {
    const EquilibriumReport& report = *dynamics.report;
    result.output["outcome"] = "report";
    ordered_json doc;
    switch (report.status) {
      case EquilibriumReport::Status::verified_bnpe: doc["status"] = "verified_bnpe"; break;
      case EquilibriumReport::Status::not_equilibrium: doc["status"] = "not_equilibrium"; break;
      case EquilibriumReport::Status::budget_exhausted: doc["status"] = "budget_exhausted"; break;
    }
    doc["rounds_used"] = report.rounds_used;
    doc["principal_values"] = values_json(report.principal_values);
    doc["agent_min_slacks"] = values_json(report.agent_min_slacks);
    doc["profile"] = profile_to_json(spec, report.profile);
    result.output["report"] = std::move(doc);
    attach_outputs(spec, report.profile, io, "dynamics");
    if (report.status == EquilibriumReport::Status::budget_exhausted) {
      result.exit_code = kExitSolver;
    }
  }
  return result;
}

CommandResult cmd_verify(const ScenarioConfig& config, const std::string& profile_path) {
  CommandResult result;
  require_valid(config);
  const GameSpec& spec = config.spec;
  std::vector<MechanismZ> profile = resolve_init_profile(config, profile_path);
  BnpeCheck check = verify_bnpe(spec, profile, config.solver.verify_tol);
  result.output["command"] = "verify";
  result.output["tol"] = json_number(config.solver.verify_tol);
  result.output["pass"] = check.pass();
  result.output["feasible"] = check.feasible;
  ordered_json violations = ordered_json::array();
  for (const auto& v : check.mechanism_violations) {
    violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
  }
  result.output["mechanism_violations"] = std::move(violations);
  result.output["incentive_compatible"] = check.incentive_compatible;
  result.output["min_slack"] = json_number(check.ic.min_slack);
  result.output["worst_agent"] = {
      {"team", check.ic.worst_team},
      {"member", check.ic.worst_member},
      {"deviation", check.ic.worst.describe(spec)},
  };
  result.output["best_responding"] = check.best_responding;
  result.output["current_values"] = values_json(check.current_values);
  result.output["best_response_values"] = values_json(check.best_response_values);
  return result;
}

CommandResult cmd_ic_slack(const ScenarioConfig& config, const std::string& profile_path) {
  CommandResult result;
  require_valid(config);
  const GameSpec& spec = config.spec;
  std::vector<MechanismZ> profile = resolve_init_profile(config, profile_path);
  result.output["command"] = "ic_slack";
  ordered_json agents = ordered_json::array();
  double min_slack = 0.0;
  bool first = true;
  for (int j = 0; j < spec.teams; ++j) {
    for (int i = 0; i < spec.members; ++i) {
      SlackReport report = ic_slack_report(spec, profile, j, i);
      agents.push_back({{"team", j},
                        {"member", i},
                        {"slack", json_number(report.slack)},
                        {"worst_deviation", report.worst.describe(spec)}});
      if (first || report.slack < min_slack) min_slack = report.slack;
      first = false;
    }
  }
  result.output["agents"] = std::move(agents);
  result.output["min_slack"] = json_number(min_slack);
  result.output["incentive_compatible"] = (min_slack >= -kFeasTol);
  return result;
}

CommandResult cmd_distance(const ScenarioConfig& config, const std::string& profile_a,
                           const std::string& profile_b) {
  CommandResult result;
  require_valid(config);
  const GameSpec& spec = config.spec;
  std::vector<MechanismZ> a = resolve_init_profile(config, profile_a);
  std::vector<MechanismZ> b = resolve_init_profile(config, profile_b);
  RobustDistance distance = robust_narrow_distance(spec, a, b);
  result.output["command"] = "distance";
  result.output["deviation_hausdorff"] = json_number(distance.deviation_hausdorff);
  result.output["truthful_prokhorov"] = json_number(distance.truthful_prokhorov);
  result.output["value"] = json_number(distance.value());
  result.output["note"] =
      "hausdorff component computed over the finite pure-deviation generator sets";
  return result;
}

}  // namespace teamgame
