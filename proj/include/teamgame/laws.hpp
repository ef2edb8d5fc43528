#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "teamgame/model.hpp"

namespace teamgame {

/// Distribution over the baseline outcome space (types, implemented actions,
/// winnings profile, rewards of all teams), dense over outcome_index().
struct OutcomeLaw {
  std::vector<double> mass;
  double total() const { return neumaier_total(mass); }
};

/// Distribution over the extended outcome space: baseline coordinates (with
/// the deviator's action coordinate holding the *recommended* action) plus the
/// deviator's reported type and actually chosen action.
struct ExtendedLaw {
  int team = 0;
  int member = 0;
  std::vector<double> mass;
  double total() const { return neumaier_total(mass); }
};

/// A pure unilateral deviation: a report per true type, and (outside
/// obedience-enforced mode) an action per (true type, recommended action).
struct DeviationStrategy {
  int team = 0;
  int member = 0;
  std::vector<int> report_map;               // size |T|
  std::optional<std::vector<int>> decision_rule;  // size |T|*|A|; absent when obedient

  bool is_truthful(const GameSpec& spec) const;
  static DeviationStrategy truthful(const GameSpec& spec, int team, int member);
};

/// Thrown when a deviation enumeration would exceed the generator cap.
struct generator_cap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Law under honest reports and obedient actions by everyone:
/// mass(t,a',w,r) = prior(t) * winnings(w | t, a') * prod_j z_j(t_j, a'_j, w_j, r_j).
OutcomeLaw truthful_law(const GameSpec& spec, const std::vector<MechanismZ>& profile);

/// Law when one agent deviates and everyone else is honest-obedient. The
/// composition follows the play order: nature draws types, the deviator
/// reports, mechanisms recommend actions on reported types, the deviator acts,
/// winnings realize on true types and implemented actions, rewards realize on
/// reported types and recommended actions.
ExtendedLaw deviation_law(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                          const DeviationStrategy& strategy);

/// Behavior-strategy variant: report_kernel is |T| x |T| (row t -> report law)
/// and action_kernel is (|T|*|T|*|A|) x |A| (row (true type, report,
/// recommendation) -> action law). In obedience-enforced mode action_kernel
/// must be empty.
ExtendedLaw deviation_law_stochastic(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                                     int team, int member,
                                     const std::vector<double>& report_kernel,
                                     const std::vector<double>& action_kernel);

/// Pushforward to payoff-relevant coordinates: substitutes the deviator's
/// actual action for their recommended one and sums out the report.
OutcomeLaw project(const GameSpec& spec, const ExtendedLaw& law);

/// All pure deviations of one agent in deterministic (report-major) order,
/// including the truthful-obedient one. Refuses above the generator cap.
std::vector<DeviationStrategy> deviation_generators(const GameSpec& spec,
                                                    const std::vector<MechanismZ>& profile,
                                                    int team, int member,
                                                    std::size_t cap = 1'000'000);

/// Number of pure deviations without enumerating them.
double deviation_generator_count(const GameSpec& spec);

/// The linear functional sum_x law(x) * table(x); table must cover the
/// outcome index.
double expected_value(const OutcomeLaw& law, std::span<const double> table);
/// Extended laws are evaluated through their projection.
double expected_value(const GameSpec& spec, const ExtendedLaw& law, std::span<const double> table);

}  // namespace teamgame
