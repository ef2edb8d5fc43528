#pragma once

#include <vector>

#include "teamgame/model.hpp"

namespace teamgame {

/// Two-team adverse-selection benchmark with a best-response cycle: one member
/// per team, types {thetaA, thetaB}, actions {A, B, C}, singleton winnings and
/// rewards, principal-implemented actions (obedience enforced). A member's
/// payoff from the off-diagonal action depends on the rival team's action.
struct MyersonParams {};

GameSpec myerson_scenario();

namespace myerson {
constexpr int kTypeA = 0;
constexpr int kTypeB = 1;
constexpr int kActionA = 0;
constexpr int kActionB = 1;
constexpr int kActionC = 2;

/// Mechanism from an action rule per report: alpha[t'][a'].
MechanismZ mechanism_from_alpha(const GameSpec& spec, int team,
                                const std::vector<std::vector<double>>& alpha);
MechanismZ c_always(const GameSpec& spec, int team);
/// Recommends A after a thetaA report and B after a thetaB report.
MechanismZ matching(const GameSpec& spec, int team);
}  // namespace myerson

/// Winner-take-all team contest with stochastic output: each team's score is
/// the sum of member type*action products and the prize goes to one team with
/// ratio-form probability. Rewards split a unit prize on a 1/G grid.
struct ContestParams {
  int teams = 2;
  int members = 1;
  double type_lo = 1.0;
  double type_hi = 2.0;
  int type_points = 2;
  double action_lo = 0.5;
  double action_hi = 1.0;
  int action_points = 2;
  double cost = 0.5;             // c in u = r - c*a/t
  int reward_divisions = 4;      // reward grid step 1/G
};

void validate_contest_params(const ContestParams& params);

/// Score of one team given its members' type and action values.
double contest_score(std::span<const double> types, std::span<const double> actions);

/// One-hot winner kernel over W^N with P(team j wins) = s_j / sum_k s_k.
/// The last winner probability absorbs the rounding residual so each row
/// sums to 1 exactly.
Kernel tullock_winnings(const ContestParams& params, const GameSpec& spec);

/// Win probabilities for given positive scores by adaptive quadrature of
/// int_0^1 prod_{k!=j} x^{s_k} d(x^{s_j}); absolute error target 1e-8.
/// Independent check of the ratio form used by tullock_winnings.
std::vector<double> winner_probability_integral(std::span<const double> scores);

GameSpec contest_scenario(const ContestParams& params);

/// Uniform action rule plus uniform feasible-reward allocation; the standard
/// neutral starting profile for best-response dynamics.
MechanismZ uniform_mechanism(const GameSpec& spec, int team);

}  // namespace teamgame
