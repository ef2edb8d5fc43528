#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamgame/spaces.hpp"

namespace teamgame {

/// Thrown when a scenario exceeds the dense-law cell budget. The cap defaults
/// to 1e6 cells and can be overridden through TEAMGAME_CELL_CAP.
struct cell_cap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t law_cell_cap();

/// The full finite game: spaces, prior, winnings technology, per-winnings
/// feasible reward sets, utility tables, and the obedience mode flag.
///
/// Agents are flattened team-major: agent (member i of team j) has id j*members+i,
/// and full type/action profiles enumerate agents in that order. A team's
/// mechanism is indexed over (T^n, A^n, W, R^n) super-axes; outcomes over
/// (T^[nN], A^[nN], W^N, R^[nN]) super-axes.
class GameSpec {
 public:
  int teams = 0;    // N
  int members = 0;  // n per team

  FiniteSpace type_space;
  FiniteSpace action_space;
  FiniteSpace winnings_space;
  FiniteSpace reward_space;

  FiniteDistribution prior;  // over T^[nN]
  Kernel winnings;           // (T^[nN] x A^[nN]) -> W^N

  // one sorted list of feasible R^n tuple ids per winnings point
  std::vector<std::vector<int>> feasible_rewards;

  // member_utility[agent] over (T^[nN], A^[nN], W^N, R^n): implemented actions,
  // true types, winnings profile, own-team rewards.
  std::vector<std::vector<double>> member_utility;
  // principal_utility[team] over (T^[nN], A^[nN], W^N)
  std::vector<std::vector<double>> principal_utility;

  bool obedience_enforced = false;

  int agent_count() const { return teams * members; }
  int agent_id(int team, int member) const { return team * members + member; }

  // super-axis cardinalities
  std::size_t team_type_count() const;     // |T|^n
  std::size_t team_action_count() const;   // |A|^n
  std::size_t team_reward_count() const;   // |R|^n
  std::size_t full_type_count() const;     // |T|^[nN]
  std::size_t full_action_count() const;   // |A|^[nN]
  std::size_t winnings_profile_count() const;  // |W|^N
  std::size_t full_reward_count() const;   // |R|^[nN]

  ProductIndex z_index() const;        // (T^n, A^n, W, R^n)
  ProductIndex outcome_index() const;  // (T^[nN], A^[nN], W^N, R^[nN])
  ProductIndex extended_index() const; // outcome axes + (T, A)
  ProductIndex member_table_index() const;     // (T^[nN], A^[nN], W^N, R^n)
  ProductIndex principal_table_index() const;  // (T^[nN], A^[nN], W^N)

  GroundMetric outcome_metric() const;
  GroundMetric extended_metric() const;

  // profile decomposition helpers (derived tables built by finalize())
  int team_type_block(std::size_t full_type, int team) const {
    return type_blocks_[full_type * teams + team];
  }
  int team_action_block(std::size_t full_action, int team) const {
    return action_blocks_[full_action * teams + team];
  }
  int team_reward_block(std::size_t full_reward, int team) const {
    return reward_blocks_[full_reward * teams + team];
  }
  int winnings_component(std::size_t profile, int team) const {
    return winnings_components_[profile * teams + team];
  }
  int agent_type(std::size_t full_type, int agent) const {
    return agent_types_[full_type * agent_count() + agent];
  }
  int agent_action(std::size_t full_action, int agent) const {
    return agent_actions_[full_action * agent_count() + agent];
  }

  /// Replaces one agent's coordinate inside a flat full action profile.
  std::size_t replace_agent_action(std::size_t full_action, int agent, int action) const;
  /// Replaces one member's coordinate inside a flat team type block.
  int replace_member_type(int team_types, int member, int type) const;

  double member_utility_at(int agent, std::size_t full_type, std::size_t full_action,
                           std::size_t winnings_profile, int team_rewards) const;
  double principal_utility_at(int team, std::size_t full_type, std::size_t full_action,
                              std::size_t winnings_profile) const;

  /// Member utility spread over the full outcome index (for expectations).
  std::vector<double> member_utility_on_outcomes(int agent) const;
  /// Principal utility spread over the full outcome index.
  std::vector<double> principal_utility_on_outcomes(int team) const;

  /// Builds the derived lookup tables; must be called once the public fields
  /// are populated and before any block/component accessor is used.
  void finalize();

 private:
  std::vector<int> type_blocks_;
  std::vector<int> action_blocks_;
  std::vector<int> reward_blocks_;
  std::vector<int> winnings_components_;
  std::vector<int> agent_types_;
  std::vector<int> agent_actions_;
};

/// One team's mechanism in joint coordinates: z(t',a',w,r) is the probability
/// of recommending a' and allocating r, given report profile t' and winnings w.
/// Row sums over (a',r) are 1 per (t',w), and the action marginal over r is
/// independent of w, so z factors as alpha(a'|t') * kappa(r|t',a',w).
struct MechanismZ {
  int team = 0;
  std::vector<double> z;  // over z_index()

  double at(const GameSpec& spec, int team_types, int team_actions, int w, int team_rewards) const;
};

struct MechanismFactored {
  int team = 0;
  Kernel alpha;  // T^n -> A^n
  Kernel kappa;  // (T^n, A^n, W) -> R^n
};

struct SpecViolation {
  std::string rule;    // which validation rule failed
  std::string detail;
};

struct SpecReport {
  bool ok = true;
  std::vector<SpecViolation> violations;
  // rules that hold automatically on finite grids, reported as satisfied
  std::vector<std::string> vacuous_rules;
};

/// Scenario validation: prior and winnings normalization, nonempty feasible
/// reward sets, finite utility tables. Continuity-style requirements are
/// vacuous on finite grids and listed as satisfied by finiteness.
SpecReport check_spec(const GameSpec& spec);

struct MechanismViolation {
  std::string rule;
  std::string detail;
};

/// Checks the MechanismZ invariants against a spec: nonnegativity, per-(t',w)
/// normalization, w-independent action marginals, and the reward support
/// constraint.
std::vector<MechanismViolation> validate_mechanism(const GameSpec& spec, const MechanismZ& m,
                                                   double tol = kMassTol);

/// z(t',a',w,r) = alpha(a'|t') * kappa(r|t',a',w). Throws if kappa places
/// mass outside feasible_rewards(w).
MechanismZ compose_mechanism(const MechanismFactored& m, const GameSpec& spec);

/// Inverse of compose: alpha is the action marginal at the first winnings
/// point; kappa rows with alpha below 1e-12 default to the uniform
/// distribution over feasible_rewards(w).
MechanismFactored factor_mechanism(const MechanismZ& m, const GameSpec& spec);

/// Action marginal alpha(a'|t') = sum_r z(t',a',w0,r).
double action_marginal(const GameSpec& spec, const MechanismZ& m, int team_types, int team_actions);

}  // namespace teamgame
