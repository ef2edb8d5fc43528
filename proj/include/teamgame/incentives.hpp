#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teamgame/laws.hpp"
#include "teamgame/model.hpp"

namespace teamgame {

/// Identifies one interim deviation scenario of one agent: a true type, a
/// report, and (outside obedience-enforced mode) an action per recommendation.
struct DeviationScenario {
  int member = 0;
  int true_type = 0;
  int report = 0;
  std::vector<int> rule;  // per recommended action; empty when obedient

  bool is_truthful(int na) const;
  std::string describe(const GameSpec& spec) const;
};

enum class RowKind { normalization, marginal_consistency, support_zero, incentive };

struct ConstraintRow {
  RowKind kind;
  std::vector<double> coeffs;  // over the team's z index
  double rhs = 0.0;
  bool equality = true;  // incentive rows are coeffs . z >= rhs
  std::optional<DeviationScenario> scenario;  // set on incentive rows
  // incentive row whose true type has no prior mass (kept, trivially slack)
  bool zero_probability_type = false;

  double evaluate(std::span<const double> z) const;
};

/// Linear description of one team's feasible incentive-compatible mechanisms,
/// holding the other teams' mechanisms fixed.
struct ConstraintSystem {
  int team = 0;
  std::size_t variables = 0;  // z table length
  std::vector<ConstraintRow> rows;

  std::size_t count(RowKind kind) const;
  /// Plain-text tableau in z-index column order, for debugging.
  std::string to_tableau(const GameSpec& spec) const;
};

/// Linear coefficients c with c . z_team = the agent's expected utility
/// restricted to the given true type, when the agent reports `report`, follows
/// `rule` (empty = obey), and everyone else is honest-obedient. Both the
/// truthful and deviation payoffs are linear in the own team's z because the
/// mechanism's action and reward stages condition on the same reports.
std::vector<double> scenario_coefficients(const GameSpec& spec,
                                          const std::vector<MechanismZ>& profile, int team,
                                          const DeviationScenario& scenario);

/// Same coefficients for the principal's expected payoff (all types, honest
/// and obedient play).
std::vector<double> principal_objective(const GameSpec& spec,
                                        const std::vector<MechanismZ>& profile, int team);

/// Truthful-obedient expected utility minus the best achievable deviation
/// utility; the maximum runs over pure deviations and includes the truthful
/// one, so the slack is never positive and incentive compatibility is
/// slack >= 0 (up to tolerance). Decomposes per true type: under a fixed
/// prior the optimal full strategy optimizes each type separately.
double ic_slack(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team,
                int member);

/// ic_slack plus the binding deviation (most profitable scenario).
struct SlackReport {
  double slack = 0.0;
  DeviationScenario worst;
};
SlackReport ic_slack_report(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team,
                            int member);

/// Feasibility rows (normalization, marginal consistency, support zeros) plus
/// one incentive inequality per (member, true type, report, rule) against the
/// fixed mechanisms of the other teams. `others` must hold the full profile;
/// the entry at `team` is ignored for the incentive rows.
ConstraintSystem ic_constraints(const GameSpec& spec, const std::vector<MechanismZ>& others,
                                int team);

struct IcCheck {
  bool ok = true;
  double min_slack = 0.0;
  int worst_team = 0;
  int worst_member = 0;
  DeviationScenario worst;
};

/// True when every agent's slack is >= -tol; reports the binding agent and
/// deviation.
IcCheck is_incentive_compatible(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                                double tol = kFeasTol);

/// All interim scenarios of one agent and true type, truthful one included,
/// in deterministic (report-major, then rule code) order.
std::vector<DeviationScenario> interim_scenarios(const GameSpec& spec, int member, int true_type);

}  // namespace teamgame
