#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "teamgame/laws.hpp"
#include "teamgame/scenarios.hpp"

using namespace teamgame;

namespace {

std::vector<MechanismZ> myerson_profile(const GameSpec& spec, bool p1_matching,
                                        bool p2_matching) {
  return {p1_matching ? myerson::matching(spec, 0) : myerson::c_always(spec, 0),
          p2_matching ? myerson::matching(spec, 1) : myerson::c_always(spec, 1)};
}

void check_law_invariants(const GameSpec& spec, const OutcomeLaw& law) {
  CHECK(std::fabs(law.total() - 1.0) <= 1e-12);
  for (double m : law.mass) CHECK(m >= 0.0);
  // no mass on rewards outside the feasible set of the realized winnings
  const std::size_t rc = spec.full_reward_count();
  const std::size_t wc = spec.winnings_profile_count();
  std::vector<std::vector<char>> feasible(spec.winnings_space.size(),
                                          std::vector<char>(spec.team_reward_count(), 0));
  for (int w = 0; w < spec.winnings_space.size(); ++w) {
    for (int r : spec.feasible_rewards[w]) feasible[w][r] = 1;
  }
  for (std::size_t x = 0; x < law.mass.size(); ++x) {
    if (law.mass[x] == 0.0) continue;
    const std::size_t r = x % rc;
    const std::size_t w = (x / rc) % wc;
    for (int j = 0; j < spec.teams; ++j) {
      CHECK(feasible[spec.winnings_component(w, j)][spec.team_reward_block(r, j)] == 1);
    }
  }
}

}  // namespace

TEST_CASE("truthful law of the C-C profile") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, false, false);
  OutcomeLaw law = truthful_law(spec, profile);
  check_law_invariants(spec, law);

  // mass 1/4 on each type pair, all recommendations (C, C)
  const ProductIndex actions({3, 3});
  const std::size_t cc = actions.flatten(std::vector<int>{myerson::kActionC, myerson::kActionC});
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t a = 0; a < 9; ++a) {
      CHECK(law.mass[t * 9 + a] == (a == cc ? 0.25 : 0.0));
    }
  }

  CHECK(expected_value(law, spec.principal_utility_on_outcomes(0)) == 5.0);
  CHECK(expected_value(law, spec.member_utility_on_outcomes(0)) == 0.0);
}

TEST_CASE("degenerate one-point game gives a point mass") {
  GameSpec spec;
  spec.teams = 2;
  spec.members = 1;
  spec.type_space = FiniteSpace::categorical("T", {"t"});
  spec.action_space = FiniteSpace::categorical("A", {"a"});
  spec.winnings_space = FiniteSpace::categorical("W", {"w"});
  spec.reward_space = FiniteSpace::categorical("R", {"r"});
  spec.obedience_enforced = true;
  spec.finalize();
  spec.prior.mass = {1.0};
  spec.winnings = Kernel::zeros(ProductIndex({1, 1}), 1);
  spec.winnings.at(0, 0) = 1.0;
  spec.feasible_rewards = {{0}};
  spec.member_utility.assign(2, {1.0});
  spec.principal_utility.assign(2, {2.0});
  REQUIRE(check_spec(spec).ok);

  MechanismZ trivial{0, {1.0}};
  std::vector<MechanismZ> profile{trivial, {1, {1.0}}};
  OutcomeLaw law = truthful_law(spec, profile);
  REQUIRE(law.mass.size() == 1);
  CHECK(law.mass[0] == 1.0);

  // the only deviation strategy is the truthful one
  auto gens = deviation_generators(spec, profile, 0, 0);
  CHECK(gens.size() == 1);
  CHECK(gens[0].is_truthful(spec));
}

TEST_CASE("truthful deviation projects back onto the truthful law exactly") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, true, false);
  OutcomeLaw truth = truthful_law(spec, profile);
  ExtendedLaw on_path =
      deviation_law(spec, profile, DeviationStrategy::truthful(spec, 0, 0));
  OutcomeLaw projected = project(spec, on_path);
  REQUIRE(projected.mass.size() == truth.mass.size());
  for (std::size_t x = 0; x < truth.mass.size(); ++x) {
    CHECK(projected.mass[x] == truth.mass[x]);
  }

  GameSpec contest = contest_scenario(ContestParams{});
  std::vector<MechanismZ> cprofile{uniform_mechanism(contest, 0), uniform_mechanism(contest, 1)};
  OutcomeLaw ctruth = truthful_law(contest, cprofile);
  check_law_invariants(contest, ctruth);
  OutcomeLaw cproj =
      project(contest, deviation_law(contest, cprofile, DeviationStrategy::truthful(contest, 1, 0)));
  for (std::size_t x = 0; x < ctruth.mass.size(); ++x) {
    CHECK(cproj.mass[x] == ctruth.mass[x]);
  }
}

TEST_CASE("always-misreporting against matching earns 1 when the rival plays C") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, true, false);
  DeviationStrategy lie;
  lie.team = 0;
  lie.member = 0;
  lie.report_map = {myerson::kTypeB, myerson::kTypeA};
  ExtendedLaw law = deviation_law(spec, profile, lie);
  CHECK(std::fabs(law.total() - 1.0) <= 1e-12);
  const double value = expected_value(spec, law, spec.member_utility_on_outcomes(0));
  CHECK(value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("contest action deviation shifts the winner odds by the ratio form") {
  ContestParams params;
  GameSpec spec = contest_scenario(params);
  // both teams always recommend the high action and split rewards uniformly
  auto high_action = [&](int team) {
    MechanismFactored f = factor_mechanism(uniform_mechanism(spec, team), spec);
    for (std::size_t t = 0; t < spec.team_type_count(); ++t) {
      f.alpha.at(t, 0) = 0.0;
      f.alpha.at(t, 1) = 1.0;
    }
    return compose_mechanism(f, spec);
  };
  std::vector<MechanismZ> profile{high_action(0), high_action(1)};

  DeviationStrategy shirk;
  shirk.team = 0;
  shirk.member = 0;
  shirk.report_map = {0, 1};
  shirk.decision_rule = std::vector<int>{0, 0, 0, 0};  // always play the low action
  OutcomeLaw law = project(spec, deviation_law(spec, profile, shirk));
  check_law_invariants(spec, law);

  // P(team 0 wins) = E_t [ (t0*0.5) / (t0*0.5 + t1*1.0) ] over the uniform prior
  double expected = 0.0;
  for (double t0 : {1.0, 2.0}) {
    for (double t1 : {1.0, 2.0}) {
      expected += 0.25 * (t0 * 0.5) / (t0 * 0.5 + t1);
    }
  }
  double p_win = 0.0;
  const std::size_t rc = spec.full_reward_count();
  const std::size_t wc = spec.winnings_profile_count();
  for (std::size_t x = 0; x < law.mass.size(); ++x) {
    if (law.mass[x] == 0.0) continue;
    const std::size_t w = (x / rc) % wc;
    if (spec.winnings_component(w, 0) == 1) p_win += law.mass[x];
  }
  CHECK(p_win == doctest::Approx(expected).epsilon(1e-12));

  // obedient play instead gives the symmetric 1/2
  OutcomeLaw obedient = truthful_law(spec, profile);
  double p_obedient = 0.0;
  for (std::size_t x = 0; x < obedient.mass.size(); ++x) {
    if (obedient.mass[x] == 0.0) continue;
    const std::size_t w = (x / rc) % wc;
    if (spec.winnings_component(w, 0) == 1) p_obedient += obedient.mass[x];
  }
  CHECK(p_obedient == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("project preserves mass and handles point masses") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, true, true);
  for (int report0 : {0, 1}) {
    DeviationStrategy s;
    s.team = 1;
    s.member = 0;
    s.report_map = {report0, report0};
    ExtendedLaw law = deviation_law(spec, profile, s);
    CHECK(std::fabs(law.total() - 1.0) <= 1e-12);
    OutcomeLaw projected = project(spec, law);
    CHECK(std::fabs(projected.total() - 1.0) <= 1e-12);
  }

  // a hand-built point mass on the extended space projects onto the
  // substituted outcome
  ExtendedLaw point;
  point.team = 0;
  point.member = 0;
  point.mass.assign(spec.extended_index().size(), 0.0);
  const ProductIndex types({2, 2});
  const ProductIndex actions({3, 3});
  const std::size_t t = types.flatten(std::vector<int>{0, 1});
  const std::size_t recommended = actions.flatten(std::vector<int>{myerson::kActionC, myerson::kActionB});
  const std::size_t cell = (((t * 9 + recommended) * 1 + 0) * 1 + 0) * 2 * 3 +
                           1 * 3 + myerson::kActionA;  // report thetaB, actual action A
  point.mass[cell] = 1.0;
  OutcomeLaw projected = project(spec, point);
  const std::size_t implemented = actions.flatten(std::vector<int>{myerson::kActionA, myerson::kActionB});
  CHECK(projected.mass[t * 9 + implemented] == 1.0);
  CHECK(std::fabs(projected.total() - 1.0) <= 1e-12);
}

TEST_CASE("generator enumeration counts and determinism") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, false, false);
  auto gens = deviation_generators(spec, profile, 0, 0);
  CHECK(gens.size() == 4);  // |T|^|T| report maps, obedience enforced
  bool truthful_found = false;
  for (const auto& g : gens) truthful_found = truthful_found || g.is_truthful(spec);
  CHECK(truthful_found);

  GameSpec contest = contest_scenario(ContestParams{});
  std::vector<MechanismZ> cprofile{uniform_mechanism(contest, 0), uniform_mechanism(contest, 1)};
  auto cgens = deviation_generators(contest, cprofile, 0, 0);
  CHECK(cgens.size() == 64);  // 2^2 reports * 2^(2*2) decision rules

  auto again = deviation_generators(contest, cprofile, 0, 0);
  for (std::size_t k = 0; k < cgens.size(); ++k) {
    CHECK(cgens[k].report_map == again[k].report_map);
    CHECK(*cgens[k].decision_rule == *again[k].decision_rule);
  }

  CHECK_THROWS_AS(deviation_generators(contest, cprofile, 0, 0, 10), generator_cap_error);
}

TEST_CASE("cell cap refuses oversized laws and honors the environment override") {
  GameSpec spec = contest_scenario(ContestParams{});
  std::vector<MechanismZ> profile{uniform_mechanism(spec, 0), uniform_mechanism(spec, 1)};
  REQUIRE(setenv("TEAMGAME_CELL_CAP", "100", 1) == 0);
  CHECK(law_cell_cap() == 100);
  CHECK_THROWS_AS(truthful_law(spec, profile), cell_cap_error);
  REQUIRE(setenv("TEAMGAME_CELL_CAP", "100000", 1) == 0);
  CHECK_NOTHROW(truthful_law(spec, profile));
  REQUIRE(unsetenv("TEAMGAME_CELL_CAP") == 0);
  CHECK(law_cell_cap() == 1'000'000);
}

TEST_CASE("mode mismatch is rejected") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, false, false);
  DeviationStrategy bad;
  bad.team = 0;
  bad.member = 0;
  bad.report_map = {0, 1};
  bad.decision_rule = std::vector<int>{1, 0, 2, 0, 1, 2};  // non-identity rule
  CHECK_THROWS_AS(deviation_law(spec, profile, bad), std::invalid_argument);
}

TEST_CASE("expected value basics") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, false, false);
  OutcomeLaw law = truthful_law(spec, profile);

  // point mass: value = table at the point
  OutcomeLaw point;
  point.mass.assign(law.mass.size(), 0.0);
  point.mass[7] = 1.0;
  std::vector<double> table(law.mass.size(), 0.0);
  table[7] = 42.0;
  CHECK(expected_value(point, table) == 42.0);

  // uniform over two outcomes valued 0 and 1
  OutcomeLaw two;
  two.mass.assign(law.mass.size(), 0.0);
  two.mass[0] = 0.5;
  two.mass[1] = 0.5;
  std::vector<double> zero_one(law.mass.size(), 0.0);
  zero_one[1] = 1.0;
  CHECK(expected_value(two, zero_one) == 0.5);

  std::vector<double> short_table(3, 0.0);
  CHECK_THROWS_AS(expected_value(law, short_table), std::invalid_argument);
}

TEST_CASE("deviation laws are linear in the deviator's mixture") {
  GameSpec spec = contest_scenario(ContestParams{});
  std::vector<MechanismZ> profile{uniform_mechanism(spec, 0), uniform_mechanism(spec, 1)};
  oracle::Rng rng(7);
  auto gens = deviation_generators(spec, profile, 1, 0);
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  for (int trial = 0; trial < 20; ++trial) {
    const auto& s1 = gens[rng.uniform_int(static_cast<int>(gens.size()))];
    const auto& s2 = gens[rng.uniform_int(static_cast<int>(gens.size()))];
    const double lambda = rng.uniform();

    // behavior-strategy form of "play s1 with probability lambda, else s2":
    // the report stage mixes the two report maps; the action stage recovers
    // the drawn branch from the report when the reports differ, and mixes the
    // two rules when they coincide
    std::vector<double> report(nt * nt, 0.0);
    std::vector<double> action(static_cast<std::size_t>(nt) * nt * na * na, 0.0);
    for (int t = 0; t < nt; ++t) {
      report[t * nt + s1.report_map[t]] += lambda;
      report[t * nt + s2.report_map[t]] += 1.0 - lambda;
      for (int rep = 0; rep < nt; ++rep) {
        for (int a = 0; a < na; ++a) {
          const std::size_t row = ((static_cast<std::size_t>(t) * nt + rep) * na + a) * na;
          if (s1.report_map[t] == s2.report_map[t]) {
            action[row + (*s1.decision_rule)[t * na + a]] += lambda;
            action[row + (*s2.decision_rule)[t * na + a]] += 1.0 - lambda;
          } else if (rep == s1.report_map[t]) {
            action[row + (*s1.decision_rule)[t * na + a]] = 1.0;
          } else if (rep == s2.report_map[t]) {
            action[row + (*s2.decision_rule)[t * na + a]] = 1.0;
          } else {
            action[row + a] = 1.0;  // off-path, never reached
          }
        }
      }
    }
    ExtendedLaw mixed = deviation_law_stochastic(spec, profile, 1, 0, report, action);
    ExtendedLaw l1 = deviation_law(spec, profile, s1);
    ExtendedLaw l2 = deviation_law(spec, profile, s2);
    for (std::size_t x = 0; x < mixed.mass.size(); ++x) {
      CHECK(std::fabs(mixed.mass[x] - (lambda * l1.mass[x] + (1.0 - lambda) * l2.mass[x])) <=
            1e-12);
    }
  }
}

TEST_CASE("report-stage mixtures of pure strategies mix the laws") {
  GameSpec spec = myerson_scenario();
  auto profile = myerson_profile(spec, true, false);
  oracle::Rng rng(11);
  auto gens = deviation_generators(spec, profile, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto& s1 = gens[rng.uniform_int(static_cast<int>(gens.size()))];
    const auto& s2 = gens[rng.uniform_int(static_cast<int>(gens.size()))];
    const double lambda = rng.uniform();
    const int nt = spec.type_space.size();
    std::vector<double> report(nt * nt, 0.0);
    for (int t = 0; t < nt; ++t) {
      report[t * nt + s1.report_map[t]] += lambda;
      report[t * nt + s2.report_map[t]] += 1.0 - lambda;
    }
    ExtendedLaw mixed = deviation_law_stochastic(spec, profile, 0, 0, report, {});
    ExtendedLaw l1 = deviation_law(spec, profile, s1);
    ExtendedLaw l2 = deviation_law(spec, profile, s2);
    for (std::size_t x = 0; x < mixed.mass.size(); ++x) {
      CHECK(std::fabs(mixed.mass[x] - (lambda * l1.mass[x] + (1.0 - lambda) * l2.mass[x])) <=
            1e-12);
    }
  }
}
