#pragma once

#include <vector>

#include "teamgame/laws.hpp"
#include "teamgame/model.hpp"

namespace teamgame {

/// How much mass can be coupled between two distributions while only pairing
/// points at ground distance <= epsilon.
struct TransportInstance {
  const GroundMetric* metric = nullptr;
  FiniteDistribution mu;  // over metric->index()
  FiniteDistribution nu;
  double epsilon = 0.0;
};

/// Maximum total coupled mass along admissible pairs, by max-flow on the
/// bipartite support graph (source capacities mu, sink capacities nu,
/// admissible edges uncapacitated). Result lies in [0, 1].
double max_transport_within(const TransportInstance& instance);

/// Prokhorov distance: the least eps such that some coupling keeps all but
/// eps of the mass within distance eps (closed-inequality convention). Scans
/// the sorted distinct support-pair distances d_k and minimizes
/// max(d_k, 1 - max_transport_within(d_k)).
double prokhorov(const std::vector<double>& mu, const std::vector<double>& nu,
                 const GroundMetric& metric);

/// Hausdorff distance between two nonempty finite sets of laws under the
/// Prokhorov metric: the larger of the two directed sup-inf deviations.
double hausdorff(const std::vector<std::vector<double>>& set_a,
                 const std::vector<std::vector<double>>& set_b, const GroundMetric& metric);

struct RobustDistance {
  double deviation_hausdorff = 0.0;  // between unilateral-deviation law sets
  double truthful_prokhorov = 0.0;   // between truthful-obedient laws
  double value() const {
    return deviation_hausdorff > truthful_prokhorov ? deviation_hausdorff : truthful_prokhorov;
  }
};

/// Distance between mechanism profiles: max of (a) the Hausdorff distance
/// between the sets of pure-deviation extended laws (union over all agents,
/// on the extended outcome metric) and (b) the Prokhorov distance between the
/// truthful laws. The deviation sets are the finite generator sets, which
/// include the truthful law.
RobustDistance robust_narrow_distance(const GameSpec& spec,
                                      const std::vector<MechanismZ>& profile_a,
                                      const std::vector<MechanismZ>& profile_b,
                                      std::size_t generator_cap = 1'000'000);

/// The pure-deviation extended laws of every agent under one profile,
/// deduplicated; the generator set behind the robust distance.
std::vector<std::vector<double>> deviation_law_set(const GameSpec& spec,
                                                   const std::vector<MechanismZ>& profile,
                                                   std::size_t generator_cap = 1'000'000);

}  // namespace teamgame
