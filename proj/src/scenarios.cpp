#include "teamgame/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace teamgame {

GameSpec myerson_scenario() {
  GameSpec spec;
  spec.teams = 2;
  spec.members = 1;
  spec.type_space = FiniteSpace::categorical("T", {"thetaA", "thetaB"});
  spec.action_space = FiniteSpace::categorical("A", {"A", "B", "C"});
  spec.winnings_space = FiniteSpace::categorical("W", {"none"});
  spec.reward_space = FiniteSpace::categorical("R", {"none"});
  spec.obedience_enforced = true;
  spec.finalize();

  spec.prior.mass.assign(spec.full_type_count(), 0.25);

  spec.winnings = Kernel::zeros(
      ProductIndex({static_cast<int>(spec.full_type_count()),
                    static_cast<int>(spec.full_action_count())}),
      1);
  for (std::size_t row = 0; row < spec.winnings.source.size(); ++row) {
    spec.winnings.at(row, 0) = 1.0;
  }
  spec.feasible_rewards = {{0}};

  using namespace myerson;
  // cross-team payoff multiplier on the member's off-diagonal action:
  // team 0 earns 2 when team 1 implements A or B, team 1 earns 2 when
  // team 0 implements C; otherwise 1.
  auto cross_multiplier = [](int team, int other_action) {
    if (team == 0) return other_action == kActionC ? 1.0 : 2.0;
    return other_action == kActionC ? 2.0 : 1.0;
  };
  auto member_payoff = [&](int team, int own_type, int own_action, int other_action) {
    const double z = cross_multiplier(team, other_action);
    if (own_action == kActionC) return 0.0;
    if (own_type == kTypeA) return own_action == kActionA ? 1.0 : z;
    return own_action == kActionB ? 1.0 : z;
  };
  auto principal_payoff = [](int own_type, int own_action) {
    if (own_action == kActionC) return 5.0;
    const bool match = (own_type == kTypeA && own_action == kActionA) ||
                       (own_type == kTypeB && own_action == kActionB);
    return match ? 6.0 : 0.0;
  };

  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  spec.member_utility.assign(2, std::vector<double>(spec.member_table_index().size(), 0.0));
  spec.principal_utility.assign(2, std::vector<double>(spec.principal_table_index().size(), 0.0));
  for (std::size_t t = 0; t < tc; ++t) {
    for (std::size_t a = 0; a < ac; ++a) {
      for (int j = 0; j < 2; ++j) {
        const int own_type = spec.agent_type(t, j);
        const int own_action = spec.agent_action(a, j);
        const int other_action = spec.agent_action(a, 1 - j);
        spec.member_utility[j][(t * ac + a)] =
            member_payoff(j, own_type, own_action, other_action);
        spec.principal_utility[j][(t * ac + a)] = principal_payoff(own_type, own_action);
      }
    }
  }
  return spec;
}

namespace myerson {

MechanismZ mechanism_from_alpha(const GameSpec& spec, int team,
                                const std::vector<std::vector<double>>& alpha) {
  MechanismFactored f;
  f.team = team;
  f.alpha = Kernel::zeros(ProductIndex({spec.type_space.size()}), spec.action_space.size());
  for (int t = 0; t < spec.type_space.size(); ++t) {
    for (int a = 0; a < spec.action_space.size(); ++a) {
      f.alpha.at(t, a) = alpha[t][a];
    }
  }
  f.kappa = Kernel::zeros(
      ProductIndex({spec.type_space.size(), spec.action_space.size(), 1}), 1);
  for (std::size_t row = 0; row < f.kappa.source.size(); ++row) f.kappa.at(row, 0) = 1.0;
  return compose_mechanism(f, spec);
}

MechanismZ c_always(const GameSpec& spec, int team) {
  return mechanism_from_alpha(spec, team, {{0, 0, 1}, {0, 0, 1}});
}

MechanismZ matching(const GameSpec& spec, int team) {
  return mechanism_from_alpha(spec, team, {{1, 0, 0}, {0, 1, 0}});
}

}  // namespace myerson

void validate_contest_params(const ContestParams& params) {
  std::ostringstream bad;
  if (params.teams < 2) bad << "at least two teams are required; ";
  if (params.members < 1) bad << "at least one member per team is required; ";
  if (!(params.type_lo > 0.0 && params.type_lo < params.type_hi)) {
    bad << "type grid needs 0 < lo < hi; ";
  }
  if (!(params.action_lo > 0.0 && params.action_lo < params.action_hi)) {
    bad << "action grid needs 0 < lo < hi; ";
  }
  if (params.type_points < 1 || params.action_points < 1) bad << "grids need at least one point; ";
  if (!(params.cost > 0.0)) bad << "cost coefficient must be positive; ";
  if (params.reward_divisions < 1) bad << "reward grid needs at least one division; ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw std::invalid_argument("invalid contest parameters: " + msg);
}

namespace {

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> out;
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  for (int k = 0; k < points; ++k) {
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  return out;
}

}  // namespace

double contest_score(std::span<const double> types, std::span<const double> actions) {
  NeumaierSum sum;
  for (std::size_t i = 0; i < types.size(); ++i) sum.add(types[i] * actions[i]);
  return sum.value();
}

Kernel tullock_winnings(const ContestParams& params, const GameSpec& spec) {
  validate_contest_params(params);
  if (spec.type_space.values.empty() || spec.action_space.values.empty()) {
    throw std::invalid_argument("tullock winnings need numeric type and action grids");
  }
  if (spec.winnings_space.size() != 2) {
    throw std::invalid_argument("tullock winnings need the two-point winnings space {0, 1}");
  }
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const int teams = spec.teams;
  const int members = spec.members;

  Kernel kernel = Kernel::zeros(
      ProductIndex({static_cast<int>(tc), static_cast<int>(ac)}), spec.winnings_profile_count());

  // flat id of the one-hot profile where team j wins
  const ProductIndex wp(std::vector<int>(teams, spec.winnings_space.size()));
  std::vector<std::size_t> winner_profile(teams);
  {
    std::vector<int> tuple(teams, 0);
    for (int j = 0; j < teams; ++j) {
      std::fill(tuple.begin(), tuple.end(), 0);
      tuple[j] = 1;
      winner_profile[j] = wp.flatten(tuple);
    }
  }

  std::vector<double> tvals(members), avals(members), scores(teams);
  for (std::size_t t = 0; t < tc; ++t) {
    for (std::size_t a = 0; a < ac; ++a) {
      double total = 0.0;
      for (int j = 0; j < teams; ++j) {
        for (int i = 0; i < members; ++i) {
          const int agent = spec.agent_id(j, i);
          tvals[i] = spec.type_space.values[spec.agent_type(t, agent)];
          avals[i] = spec.action_space.values[spec.agent_action(a, agent)];
        }
        scores[j] = contest_score(tvals, avals);
        total += scores[j];
      }
      if (!(total > 0.0)) {
        throw std::invalid_argument("tullock winnings need a positive total score");
      }
      const std::size_t row = t * ac + a;
      double assigned = 0.0;
      for (int j = 0; j + 1 < teams; ++j) {
        const double p = scores[j] / total;
        kernel.at(row, winner_profile[j]) = p;
        assigned += p;
      }
      kernel.at(row, winner_profile[teams - 1]) = 1.0 - assigned;
    }
  }
  return kernel;
}

namespace {

double power_product_integrand(std::span<const double> scores, int j, double x) {
  // d/dx of x^{s_j} against the product of the rivals' CDFs x^{s_k}
  double rivals = 1.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (static_cast<int>(k) == j) continue;
    rivals *= std::pow(x, scores[k]);
  }
  return rivals * scores[j] * std::pow(x, scores[j] - 1.0);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate01(const std::function<double(double)>& f, double tol) {
  // open left endpoint: the integrand may blow up at 0 when the total
  // exponent is below 1, so start a hair inside and refine from there
  const double a = 1e-12;
  const double b = 1.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

std::vector<double> winner_probability_integral(std::span<const double> scores) {
  for (double s : scores) {
    if (!(s > 0.0)) throw std::invalid_argument("winner probabilities need positive scores");
  }
  std::vector<double> out(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    auto f = [&scores, j](double x) {
      return power_product_integrand(scores, static_cast<int>(j), x);
    };
    out[j] = integrate01(f, 1e-9);
  }
  return out;
}

GameSpec contest_scenario(const ContestParams& params) {
  validate_contest_params(params);
  GameSpec spec;
  spec.teams = params.teams;
  spec.members = params.members;
  spec.type_space =
      FiniteSpace::numeric_grid("T", linear_grid(params.type_lo, params.type_hi, params.type_points));
  spec.action_space = FiniteSpace::numeric_grid(
      "A", linear_grid(params.action_lo, params.action_hi, params.action_points));
  spec.winnings_space = FiniteSpace::numeric_grid("W", {0.0, 1.0});
  std::vector<double> rewards;
  for (int k = 0; k <= params.reward_divisions; ++k) {
    rewards.push_back(static_cast<double>(k) / static_cast<double>(params.reward_divisions));
  }
  spec.reward_space = FiniteSpace::numeric_grid("R", rewards);
  spec.obedience_enforced = false;
  spec.finalize();

  const std::size_t type_cells = spec.full_type_count();
  spec.prior.mass.assign(type_cells, 1.0 / static_cast<double>(type_cells));
  // exact unit total: the last cell absorbs the rounding residual
  double assigned = 0.0;
  for (std::size_t t = 0; t + 1 < type_cells; ++t) assigned += spec.prior.mass[t];
  spec.prior.mass[type_cells - 1] = 1.0 - assigned;

  spec.winnings = tullock_winnings(params, spec);

  // losing team: everyone gets 0; winning team: any split with sum <= 1
  const ProductIndex team_rewards(std::vector<int>(spec.members, spec.reward_space.size()));
  std::vector<int> zero_tuple(spec.members, 0);
  std::vector<int> tuple(spec.members);
  std::vector<int> winning_set;
  for (std::size_t r = 0; r < team_rewards.size(); ++r) {
    team_rewards.unflatten(r, tuple);
    double total = 0.0;
    for (int i = 0; i < spec.members; ++i) total += spec.reward_space.values[tuple[i]];
    if (total <= 1.0 + 1e-12) winning_set.push_back(static_cast<int>(r));
  }
  spec.feasible_rewards = {{static_cast<int>(team_rewards.flatten(zero_tuple))}, winning_set};

  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rc = spec.team_reward_count();
  spec.member_utility.assign(spec.agent_count(),
                             std::vector<double>(spec.member_table_index().size(), 0.0));
  spec.principal_utility.assign(spec.teams,
                                std::vector<double>(spec.principal_table_index().size(), 0.0));
  const ProductIndex team_reward_index(std::vector<int>(spec.members, spec.reward_space.size()));
  std::vector<int> rtuple(spec.members);
  for (std::size_t t = 0; t < tc; ++t) {
    for (std::size_t a = 0; a < ac; ++a) {
      for (std::size_t w = 0; w < wc; ++w) {
        for (int j = 0; j < spec.teams; ++j) {
          spec.principal_utility[j][(t * ac + a) * wc + w] =
              spec.winnings_space.values[spec.winnings_component(w, j)];
        }
        for (std::size_t r = 0; r < rc; ++r) {
          team_reward_index.unflatten(r, rtuple);
          for (int j = 0; j < spec.teams; ++j) {
            for (int i = 0; i < spec.members; ++i) {
              const int agent = spec.agent_id(j, i);
              const double tv = spec.type_space.values[spec.agent_type(t, agent)];
              const double av = spec.action_space.values[spec.agent_action(a, agent)];
              const double rv = spec.reward_space.values[rtuple[i]];
              spec.member_utility[agent][((t * ac + a) * wc + w) * rc + r] =
                  rv - params.cost * av / tv;
            }
          }
        }
      }
    }
  }
  return spec;
}

MechanismZ uniform_mechanism(const GameSpec& spec, int team) {
  MechanismFactored f;
  f.team = team;
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  f.alpha = Kernel::zeros(ProductIndex({static_cast<int>(tn)}), an);
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) f.alpha.at(t, a) = 1.0 / static_cast<double>(an);
  }
  f.kappa = Kernel::zeros(
      ProductIndex({static_cast<int>(tn), static_cast<int>(an), static_cast<int>(wn)}),
      spec.team_reward_count());
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      for (std::size_t w = 0; w < wn; ++w) {
        const auto& feas = spec.feasible_rewards[w];
        const std::size_t row = (t * an + a) * wn + w;
        for (int r : feas) f.kappa.at(row, r) = 1.0 / static_cast<double>(feas.size());
      }
    }
  }
  return compose_mechanism(f, spec);
}

}  // namespace teamgame
