// teamgame: multi-principal mechanism games on finite grids.
// Loads a scenario config, runs one command, prints a JSON document.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "teamgame/commands.hpp"
#include "teamgame/laws.hpp"

using namespace teamgame;

int main(int argc, char** argv) {
  CLI::App app{"multi-principal mechanism games on finite grids"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  app.add_option("--config,-c", config_path, "scenario config file (JSON)")->required();
  std::string csv_dir;
  app.add_option("--csv", csv_dir, "also write result tables as CSV into this directory");
  std::string out_profile;
  app.add_option("--out", out_profile, "write the resulting profile to this file");

  auto* validate = app.add_subcommand("validate", "check the scenario against its assumptions");

  auto* best_response =
      app.add_subcommand("best-response", "solve one team's best-response program");
  int team = 0;
  best_response->add_option("--team", team, "responding team")->required();
  std::string given = "uniform";
  best_response->add_option("--given", given, "rival profile: file path, 'uniform' or 'C_C'");

  auto* dynamics = app.add_subcommand("dynamics", "iterate best responses from a profile");
  std::string init = "uniform";
  dynamics->add_option("--init", init, "initial profile: file path, 'uniform' or 'C_C'");

  auto* verify = app.add_subcommand("verify", "audit a profile against the equilibrium clauses");
  std::string verify_profile;
  verify->add_option("--profile", verify_profile, "profile file")->required();

  auto* ic_slack = app.add_subcommand("ic-slack", "incentive slack of every agent");
  std::string slack_profile;
  ic_slack->add_option("--profile", slack_profile, "profile file")->required();

  auto* distance = app.add_subcommand("distance", "robust narrow distance between two profiles");
  std::string profile_a;
  std::string profile_b;
  distance->add_option("--profile-a", profile_a, "first profile file")->required();
  distance->add_option("--profile-b", profile_b, "second profile file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  CommandIo io;
  if (!csv_dir.empty()) io.csv_dir = csv_dir;
  if (!out_profile.empty()) io.out_profile = out_profile;

  try {
    ScenarioConfig config = load_scenario_file(config_path);
    CommandResult result;
    if (*validate) {
      result = cmd_validate(config);
    } else if (*best_response) {
      result = cmd_best_response(config, team, given, io);
    } else if (*dynamics) {
      result = cmd_dynamics(config, init, io);
    } else if (*verify) {
      result = cmd_verify(config, verify_profile);
    } else if (*ic_slack) {
      result = cmd_ic_slack(config, slack_profile);
    } else {
      result = cmd_distance(config, profile_a, profile_b);
    }
    std::cout << result.output.dump(2) << '\n';
    return result.exit_code;
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const solver_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const generator_cap_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const cell_cap_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
