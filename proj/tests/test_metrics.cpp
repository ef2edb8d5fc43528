#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "teamgame/metrics.hpp"
#include "teamgame/scenarios.hpp"

using namespace teamgame;

namespace {

GroundMetric two_point_discrete() {
  return GroundMetric{{FiniteSpace::categorical("s", {"x", "y"})}, GroundMetricKind::component_max};
}

GroundMetric line_metric(std::vector<double> values) {
  return GroundMetric{{FiniteSpace::numeric_grid("s", std::move(values))},
                      GroundMetricKind::component_max};
}

std::vector<MechanismZ> myerson_profile(const GameSpec& spec, bool p1_matching,
                                        bool p2_matching) {
  return {p1_matching ? myerson::matching(spec, 0) : myerson::c_always(spec, 0),
          p2_matching ? myerson::matching(spec, 1) : myerson::c_always(spec, 1)};
}

}  // namespace

TEST_CASE("max transport basics") {
  GroundMetric metric = two_point_discrete();
  TransportInstance inst{&metric, FiniteDistribution{{0.7, 0.3}},
                         FiniteDistribution{{0.5, 0.5}}, 0.0};
  // only same-point mass can move at eps 0: min(0.7,0.5) + min(0.3,0.5)
  CHECK(max_transport_within(inst) == doctest::Approx(0.8).epsilon(1e-15));

  inst.epsilon = 1.0;  // the whole diameter
  CHECK(max_transport_within(inst) == doctest::Approx(1.0).epsilon(1e-15));

  TransportInstance same{&metric, FiniteDistribution{{0.25, 0.75}},
                         FiniteDistribution{{0.25, 0.75}}, 0.0};
  CHECK(max_transport_within(same) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("max transport is nondecreasing in epsilon across breakpoints") {
  GroundMetric metric = line_metric({0.0, 0.2, 0.45, 0.8, 1.0});
  oracle::Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    TransportInstance inst{&metric, FiniteDistribution{rng.distribution(5)},
                           FiniteDistribution{rng.distribution(5)}, 0.0};
    double previous = -1.0;
    for (double eps : {0.0, 0.2, 0.25, 0.45, 0.55, 0.8, 1.0}) {
      inst.epsilon = eps;
      const double moved = max_transport_within(inst);
      CHECK(moved >= previous - 1e-12);
      previous = moved;
    }
    CHECK(previous == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("prokhorov special values") {
  // identical distributions
  GroundMetric metric = line_metric({0.0, 0.4, 1.0});
  std::vector<double> mu{0.2, 0.5, 0.3};
  CHECK(prokhorov(mu, mu, metric) == 0.0);

  // point masses at ground distance 0.4
  std::vector<double> at0{1.0, 0.0, 0.0};
  std::vector<double> at04{0.0, 1.0, 0.0};
  CHECK(prokhorov(at0, at04, metric) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(oracle::prokhorov_by_events(at0, at04, metric) ==
        doctest::Approx(0.4).epsilon(1e-15));

  // discrete metric: prokhorov equals total variation
  GroundMetric disc = two_point_discrete();
  std::vector<double> a{0.7, 0.3};
  std::vector<double> b{0.5, 0.5};
  CHECK(prokhorov(a, b, disc) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(oracle::prokhorov_by_events(a, b, disc) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("prokhorov equals the event-enumeration oracle on dyadic pairs") {
  oracle::Rng rng(2025);
  int done = 0;
  while (done < 200) {
    const int points = 2 + rng.uniform_int(7);  // up to 8 support points
    std::vector<double> values;
    for (int k = 0; k < points; ++k) values.push_back(rng.uniform());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (static_cast<int>(values.size()) < points) continue;
    // span-normalized numeric grid; occasionally the discrete metric
    GroundMetric metric = (done % 5 == 0)
                              ? GroundMetric{{FiniteSpace::numeric_grid("s", values)},
                                             GroundMetricKind::discrete}
                              : line_metric(values);
    const std::vector<double> mu = rng.dyadic_distribution(points);
    const std::vector<double> nu = rng.dyadic_distribution(points);
    const double fast = prokhorov(mu, nu, metric);
    const double brute = oracle::prokhorov_by_events(mu, nu, metric);
    CHECK(fast == brute);
    ++done;
  }
}

TEST_CASE("prokhorov equals total variation under the discrete metric") {
  oracle::Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int points = 2 + rng.uniform_int(9);
    std::vector<std::string> labels;
    for (int k = 0; k < points; ++k) labels.push_back("p" + std::to_string(k));
    GroundMetric metric{{FiniteSpace::categorical("s", labels)}, GroundMetricKind::component_max};
    const std::vector<double> mu = rng.distribution(points);
    const std::vector<double> nu = rng.distribution(points);
    CHECK(std::fabs(prokhorov(mu, nu, metric) - oracle::total_variation(mu, nu)) <= 1e-12);
  }
}

TEST_CASE("hausdorff distance") {
  GroundMetric metric = line_metric({0.0, 0.4, 1.0});
  std::vector<double> dx{1.0, 0.0, 0.0};
  std::vector<double> dy{0.0, 1.0, 0.0};

  CHECK(hausdorff({dx, dy}, {dx, dy}, metric) == 0.0);
  CHECK(hausdorff({dx}, {dx, dy}, metric) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(hausdorff({dx}, {dy}, metric) == prokhorov(dx, dy, metric));
  CHECK_THROWS_AS(hausdorff({}, {dx}, metric), std::invalid_argument);
}

TEST_CASE("metric axioms on random triples") {
  oracle::Rng rng(99);
  GroundMetric metric = line_metric({0.0, 0.25, 0.5, 0.75, 1.0});
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = rng.distribution(5);
    const auto nu = rng.distribution(5);
    const auto rho = rng.distribution(5);
    const double ab = prokhorov(mu, nu, metric);
    const double ba = prokhorov(nu, mu, metric);
    const double ac = prokhorov(mu, rho, metric);
    const double cb = prokhorov(rho, nu, metric);
    CHECK(ab >= 0.0);
    CHECK(std::fabs(ab - ba) <= 1e-9);
    CHECK(prokhorov(mu, mu, metric) == 0.0);
    CHECK(ab <= ac + cb + 1e-9);
  }
  // hausdorff triangle inequality over random small sets
  for (int trial = 0; trial < 30; ++trial) {
    auto make_set = [&](int n) {
      std::vector<std::vector<double>> out;
      for (int k = 0; k < n; ++k) out.push_back(rng.distribution(5));
      return out;
    };
    const auto sa = make_set(1 + rng.uniform_int(3));
    const auto sb = make_set(1 + rng.uniform_int(3));
    const auto sc = make_set(1 + rng.uniform_int(3));
    const double ab = hausdorff(sa, sb, metric);
    CHECK(std::fabs(ab - hausdorff(sb, sa, metric)) <= 1e-12);
    CHECK(hausdorff(sa, sa, metric) == 0.0);
    CHECK(ab <= hausdorff(sa, sc, metric) + hausdorff(sc, sb, metric) + 1e-9);
  }
}

TEST_CASE("prokhorov on outcome laws matches the events oracle") {
  // deterministic profiles put the truthful law on four cells, small enough
  // for exhaustive event enumeration on the product-space metric
  GameSpec spec = myerson_scenario();
  const GroundMetric metric = spec.outcome_metric();
  const std::vector<std::vector<MechanismZ>> profiles{
      {myerson::c_always(spec, 0), myerson::c_always(spec, 1)},
      {myerson::matching(spec, 0), myerson::c_always(spec, 1)},
      {myerson::matching(spec, 0), myerson::matching(spec, 1)},
      {myerson::c_always(spec, 0), myerson::matching(spec, 1)}};
  for (const auto& a : profiles) {
    for (const auto& b : profiles) {
      const OutcomeLaw la = truthful_law(spec, a);
      const OutcomeLaw lb = truthful_law(spec, b);
      CHECK(prokhorov(la.mass, lb.mass, metric) ==
            oracle::prokhorov_by_events(la.mass, lb.mass, metric));
    }
  }
}

TEST_CASE("robust distance between mechanism profiles") {
  GameSpec spec = myerson_scenario();
  auto cc = myerson_profile(spec, false, false);
  auto mc = myerson_profile(spec, true, false);

  CHECK_THROWS_AS(robust_narrow_distance(spec, cc, mc, 1), generator_cap_error);

  RobustDistance self = robust_narrow_distance(spec, cc, cc);
  CHECK(self.value() == 0.0);
  CHECK(self.deviation_hausdorff == 0.0);
  CHECK(self.truthful_prokhorov == 0.0);

  RobustDistance forward = robust_narrow_distance(spec, cc, mc);
  RobustDistance backward = robust_narrow_distance(spec, mc, cc);
  CHECK(forward.value() > 0.0);
  CHECK(std::fabs(forward.value() - backward.value()) <= 1e-12);
  CHECK(forward.value() ==
        std::max(forward.deviation_hausdorff, forward.truthful_prokhorov));

  // triangle inequality across the three distinct cycle profiles
  auto mm = myerson_profile(spec, true, true);
  const double ab = robust_narrow_distance(spec, cc, mc).value();
  const double bc = robust_narrow_distance(spec, mc, mm).value();
  const double ac = robust_narrow_distance(spec, cc, mm).value();
  CHECK(ac <= ab + bc + 1e-9);
}
