#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamgame/incentives.hpp"

namespace teamgame {

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// maximize objective . x subject to the constraint system, 0 <= x <= 1.
struct LinearProgram {
  std::vector<double> objective;
  ConstraintSystem constraints;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double value = 0.0;
  std::vector<double> solution;
};

/// Two-phase dense simplex with Bland's rule; entering variable is the lowest
/// improving index and ratio ties resolve to the lowest basis index, so runs
/// are deterministic and cycling cannot occur. Feasibility tolerance 1e-9.
LpResult solve_lp(const LinearProgram& lp);

/// True when the team's incentive-compatibility polytope is nonempty against
/// the fixed rival mechanisms (phase-1 feasibility).
bool ic_feasible(const GameSpec& spec, const std::vector<MechanismZ>& others, int team);

struct BestResponse {
  MechanismZ mechanism;
  double value = 0.0;
};

/// Maximizes the principal's expected payoff over the team's IC polytope and
/// returns the optimal vertex. Throws solver_error when the polytope is
/// empty (the equilibrium machinery needs at least one always-feasible
/// mechanism to exist).
BestResponse best_response(const GameSpec& spec, const std::vector<MechanismZ>& others, int team);

enum class Schedule { alternating, simultaneous };

struct DynamicsOptions {
  Schedule schedule = Schedule::alternating;
  double damping = 1.0;    // z <- damping * BR + (1 - damping) * z
  int max_rounds = 200;    // one round updates every team once
  double tol = 1e-9;       // max-abs z change per round that counts as converged
  double verify_tol = 1e-7;
  double cycle_rounding = 1e-6;  // profiles are hashed after rounding to this step
};

struct EquilibriumReport {
  enum class Status { verified_bnpe, not_equilibrium, budget_exhausted };
  Status status = Status::budget_exhausted;
  std::vector<MechanismZ> profile;
  std::vector<double> principal_values;        // per team, truthful play
  std::vector<double> agent_min_slacks;        // team-major agent order
  int rounds_used = 0;
};

/// A certified best-response cycle: applying the recorded mover's best
/// response to profiles[k] (with the dynamics' damping) yields
/// profiles[(k+1) % period] within match_tol.
struct CycleCertificate {
  std::vector<std::vector<MechanismZ>> profiles;
  std::vector<int> movers;                      // -1 means all teams (simultaneous)
  std::vector<std::vector<double>> step_values; // best-response values per step
  int period = 0;
  double match_tol = 0.0;
};

struct DynamicsResult {
  std::optional<EquilibriumReport> report;
  std::optional<CycleCertificate> cycle;
};

/// Iterates best responses from an initial profile. Declares convergence when
/// a full round moves no z coordinate by more than tol; the converged profile
/// is then verified and reported as an equilibrium or not. Revisiting a
/// rounded (profile, turn) state yields a cycle certificate. Otherwise the
/// round budget runs out.
DynamicsResult best_response_dynamics(const GameSpec& spec, std::vector<MechanismZ> init,
                                      const DynamicsOptions& options);

struct BnpeCheck {
  bool feasible = true;
  std::vector<MechanismViolation> mechanism_violations;
  bool incentive_compatible = true;
  IcCheck ic;
  bool best_responding = true;
  std::vector<double> current_values;
  std::vector<double> best_response_values;
  bool pass() const { return feasible && incentive_compatible && best_responding; }
};

/// Equilibrium audit of a profile: mechanism invariants (with the support
/// constraint), every agent's incentive slack >= -tol, and no principal able
/// to gain more than tol by switching to a best response.
BnpeCheck verify_bnpe(const GameSpec& spec, const std::vector<MechanismZ>& profile, double tol);

/// Expected principal payoff under honest-obedient play.
double principal_value(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team);

}  // namespace teamgame
