#include "teamgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace teamgame {

namespace {

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

std::vector<int> repeated(int value, int count) {
  return std::vector<int>(static_cast<std::size_t>(count), value);
}

}  // namespace

std::size_t law_cell_cap() {
  if (const char* env = std::getenv("TEAMGAME_CELL_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

std::size_t GameSpec::team_type_count() const { return int_pow(type_space.size(), members); }
std::size_t GameSpec::team_action_count() const { return int_pow(action_space.size(), members); }
std::size_t GameSpec::team_reward_count() const { return int_pow(reward_space.size(), members); }
std::size_t GameSpec::full_type_count() const { return int_pow(type_space.size(), agent_count()); }
std::size_t GameSpec::full_action_count() const { return int_pow(action_space.size(), agent_count()); }
std::size_t GameSpec::winnings_profile_count() const { return int_pow(winnings_space.size(), teams); }
std::size_t GameSpec::full_reward_count() const { return int_pow(reward_space.size(), agent_count()); }

ProductIndex GameSpec::z_index() const {
  return ProductIndex({static_cast<int>(team_type_count()), static_cast<int>(team_action_count()),
                       winnings_space.size(), static_cast<int>(team_reward_count())});
}

ProductIndex GameSpec::outcome_index() const {
  return ProductIndex({static_cast<int>(full_type_count()), static_cast<int>(full_action_count()),
                       static_cast<int>(winnings_profile_count()),
                       static_cast<int>(full_reward_count())});
}

ProductIndex GameSpec::extended_index() const {
  return ProductIndex({static_cast<int>(full_type_count()), static_cast<int>(full_action_count()),
                       static_cast<int>(winnings_profile_count()),
                       static_cast<int>(full_reward_count()), type_space.size(),
                       action_space.size()});
}

ProductIndex GameSpec::member_table_index() const {
  return ProductIndex({static_cast<int>(full_type_count()), static_cast<int>(full_action_count()),
                       static_cast<int>(winnings_profile_count()),
                       static_cast<int>(team_reward_count())});
}

ProductIndex GameSpec::principal_table_index() const {
  return ProductIndex({static_cast<int>(full_type_count()), static_cast<int>(full_action_count()),
                       static_cast<int>(winnings_profile_count())});
}

GroundMetric GameSpec::outcome_metric() const {
  GroundMetric metric;
  metric.kind = GroundMetricKind::component_max;
  for (int a = 0; a < agent_count(); ++a) metric.axes.push_back(type_space);
  for (int a = 0; a < agent_count(); ++a) metric.axes.push_back(action_space);
  for (int j = 0; j < teams; ++j) metric.axes.push_back(winnings_space);
  for (int a = 0; a < agent_count(); ++a) metric.axes.push_back(reward_space);
  return metric;
}

GroundMetric GameSpec::extended_metric() const {
  GroundMetric metric = outcome_metric();
  metric.axes.push_back(type_space);
  metric.axes.push_back(action_space);
  return metric;
}

std::size_t GameSpec::replace_agent_action(std::size_t full_action, int agent, int action) const {
  const std::size_t stride = int_pow(action_space.size(), agent_count() - 1 - agent);
  const int current = agent_action(full_action, agent);
  return full_action - static_cast<std::size_t>(current) * stride +
         static_cast<std::size_t>(action) * stride;
}

int GameSpec::replace_member_type(int team_types, int member, int type) const {
  const int stride = static_cast<int>(int_pow(type_space.size(), members - 1 - member));
  const int current = (team_types / stride) % type_space.size();
  return team_types + (type - current) * stride;
}

double GameSpec::member_utility_at(int agent, std::size_t full_type, std::size_t full_action,
                                   std::size_t winnings_profile, int team_rewards) const {
  const std::size_t w = winnings_profile_count();
  const std::size_t r = team_reward_count();
  const std::size_t a = full_action_count();
  std::size_t idx = ((full_type * a + full_action) * w + winnings_profile) * r +
                    static_cast<std::size_t>(team_rewards);
  return member_utility[agent][idx];
}

double GameSpec::principal_utility_at(int team, std::size_t full_type, std::size_t full_action,
                                      std::size_t winnings_profile) const {
  const std::size_t w = winnings_profile_count();
  const std::size_t a = full_action_count();
  std::size_t idx = (full_type * a + full_action) * w + winnings_profile;
  return principal_utility[team][idx];
}

std::vector<double> GameSpec::member_utility_on_outcomes(int agent) const {
  const int team = agent / members;
  const ProductIndex outcomes = outcome_index();
  std::vector<double> table(outcomes.size());
  const std::size_t wc = winnings_profile_count();
  const std::size_t rc = full_reward_count();
  const std::size_t ac = full_action_count();
  for (std::size_t x = 0; x < table.size(); ++x) {
    std::size_t rest = x;
    const std::size_t rhat = rest % rc;
    rest /= rc;
    const std::size_t w = rest % wc;
    rest /= wc;
    const std::size_t ahat = rest % ac;
    const std::size_t that = rest / ac;
    table[x] = member_utility_at(agent, that, ahat, w, team_reward_block(rhat, team));
  }
  return table;
}

std::vector<double> GameSpec::principal_utility_on_outcomes(int team) const {
  const ProductIndex outcomes = outcome_index();
  std::vector<double> table(outcomes.size());
  const std::size_t wc = winnings_profile_count();
  const std::size_t rc = full_reward_count();
  const std::size_t ac = full_action_count();
  for (std::size_t x = 0; x < table.size(); ++x) {
    std::size_t rest = x / rc;
    const std::size_t w = rest % wc;
    rest /= wc;
    const std::size_t ahat = rest % ac;
    const std::size_t that = rest / ac;
    table[x] = principal_utility_at(team, that, ahat, w);
  }
  return table;
}

void GameSpec::finalize() {
  if (teams <= 0 || members <= 0) {
    throw std::invalid_argument("game needs at least one team and one member per team");
  }
  const int agents = agent_count();
  const std::size_t tc = full_type_count();
  const std::size_t ac = full_action_count();
  const std::size_t rc = full_reward_count();
  const std::size_t wc = winnings_profile_count();

  auto build_blocks = [&](std::size_t total, int point_count, std::vector<int>& blocks,
                          std::vector<int>& per_agent) {
    const ProductIndex agent_axes(repeated(point_count, agents));
    blocks.assign(total * static_cast<std::size_t>(teams), 0);
    per_agent.assign(total * static_cast<std::size_t>(agents), 0);
    std::vector<int> tuple(agents);
    const ProductIndex team_axes(repeated(point_count, members));
    std::vector<int> team_tuple(members);
    for (std::size_t flat = 0; flat < total; ++flat) {
      agent_axes.unflatten(flat, tuple);
      for (int a = 0; a < agents; ++a) per_agent[flat * agents + a] = tuple[a];
      for (int j = 0; j < teams; ++j) {
        for (int i = 0; i < members; ++i) team_tuple[i] = tuple[j * members + i];
        blocks[flat * teams + j] = static_cast<int>(team_axes.flatten(team_tuple));
      }
    }
  };

  std::vector<int> scratch;
  build_blocks(tc, type_space.size(), type_blocks_, agent_types_);
  build_blocks(ac, action_space.size(), action_blocks_, agent_actions_);
  build_blocks(rc, reward_space.size(), reward_blocks_, scratch);

  const ProductIndex wp(repeated(winnings_space.size(), teams));
  winnings_components_.assign(wc * static_cast<std::size_t>(teams), 0);
  std::vector<int> wt(teams);
  for (std::size_t flat = 0; flat < wc; ++flat) {
    wp.unflatten(flat, wt);
    for (int j = 0; j < teams; ++j) winnings_components_[flat * teams + j] = wt[j];
  }
}

double MechanismZ::at(const GameSpec& spec, int team_types, int team_actions, int w,
                      int team_rewards) const {
  const std::size_t an = spec.team_action_count();
  const std::size_t rn = spec.team_reward_count();
  const std::size_t wn = spec.winnings_space.size();
  std::size_t idx = ((static_cast<std::size_t>(team_types) * an + team_actions) * wn + w) * rn +
                    team_rewards;
  return z[idx];
}

SpecReport check_spec(const GameSpec& spec) {
  SpecReport report;
  auto fail = [&](std::string rule, std::string detail) {
    report.ok = false;
    report.violations.push_back({std::move(rule), std::move(detail)});
  };

  try {
    validate_space(spec.type_space);
    validate_space(spec.action_space);
    validate_space(spec.winnings_space);
    validate_space(spec.reward_space);
  } catch (const std::exception& e) {
    fail("ambient_spaces", e.what());
  }

  if (spec.prior.size() != spec.full_type_count()) {
    fail("prior_normalized", "prior table size does not match the joint type space");
  } else if (!spec.prior.is_normalized()) {
    std::ostringstream detail;
    detail << "prior not normalized: total mass " << spec.prior.total();
    fail("prior_normalized", detail.str());
  }

  if (spec.winnings.source.size() != spec.full_type_count() * spec.full_action_count() ||
      spec.winnings.target_size != spec.winnings_profile_count()) {
    fail("winnings_kernel", "winnings kernel shape does not match the type/action profiles");
  } else {
    KernelReport kr = validate_kernel(spec.winnings);
    if (!kr.ok) fail("winnings_kernel", kr.violations.front().describe());
  }

  if (spec.feasible_rewards.size() != static_cast<std::size_t>(spec.winnings_space.size())) {
    fail("feasible_rewards_nonempty", "one feasible reward set is required per winnings point");
  } else {
    for (int w = 0; w < spec.winnings_space.size(); ++w) {
      if (spec.feasible_rewards[w].empty()) {
        fail("feasible_rewards_nonempty",
             "feasible reward set is empty for winnings point '" + spec.winnings_space.labels[w] + "'");
      }
      for (int r : spec.feasible_rewards[w]) {
        if (r < 0 || static_cast<std::size_t>(r) >= spec.team_reward_count()) {
          fail("feasible_rewards_nonempty", "feasible reward id outside the reward grid");
          break;
        }
      }
    }
  }

  const std::size_t member_table = spec.member_table_index().size();
  if (spec.member_utility.size() != static_cast<std::size_t>(spec.agent_count())) {
    fail("utilities_bounded", "one member utility table is required per agent");
  } else {
    for (int a = 0; a < spec.agent_count(); ++a) {
      if (spec.member_utility[a].size() != member_table) {
        fail("utilities_bounded", "member utility table has the wrong size");
        break;
      }
      for (double v : spec.member_utility[a]) {
        if (!std::isfinite(v)) {
          fail("utilities_bounded", "member utility table contains a non-finite value");
          break;
        }
      }
    }
  }
  const std::size_t principal_table = spec.principal_table_index().size();
  if (spec.principal_utility.size() != static_cast<std::size_t>(spec.teams)) {
    fail("utilities_bounded", "one principal utility table is required per team");
  } else {
    for (int j = 0; j < spec.teams; ++j) {
      if (spec.principal_utility[j].size() != principal_table) {
        fail("utilities_bounded", "principal utility table has the wrong size");
        break;
      }
      for (double v : spec.principal_utility[j]) {
        if (!std::isfinite(v)) {
          fail("utilities_bounded", "principal utility table contains a non-finite value");
          break;
        }
      }
    }
  }

  // continuity and compactness requirements hold automatically on finite grids
  report.vacuous_rules = {"spaces_compact_metrizable", "winnings_narrow_continuity",
                          "feasible_rewards_continuity", "utilities_continuity"};
  return report;
}

std::vector<MechanismViolation> validate_mechanism(const GameSpec& spec, const MechanismZ& m,
                                                   double tol) {
  std::vector<MechanismViolation> out;
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  if (m.z.size() != tn * an * wn * rn) {
    out.push_back({"shape", "z table size does not match the mechanism index"});
    return out;
  }
  for (double v : m.z) {
    if (v < 0.0) {
      out.push_back({"nonnegative", "z has a negative entry"});
      break;
    }
  }
  std::vector<char> feasible(wn * rn, 0);
  for (std::size_t w = 0; w < wn; ++w) {
    for (int r : spec.feasible_rewards[w]) feasible[w * rn + r] = 1;
  }
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t w = 0; w < wn; ++w) {
      NeumaierSum sum;
      for (std::size_t a = 0; a < an; ++a) {
        for (std::size_t r = 0; r < rn; ++r) {
          sum.add(m.at(spec, t, a, w, r));
        }
      }
      if (std::fabs(sum.value() - 1.0) > tol) {
        std::ostringstream detail;
        detail << "mass over (a',r) at (t'=" << t << ", w=" << w << ") sums to " << sum.value();
        out.push_back({"normalization", detail.str()});
      }
    }
    for (std::size_t a = 0; a < an; ++a) {
      NeumaierSum first;
      for (std::size_t r = 0; r < rn; ++r) first.add(m.at(spec, t, a, 0, r));
      for (std::size_t w = 1; w < wn; ++w) {
        NeumaierSum other;
        for (std::size_t r = 0; r < rn; ++r) other.add(m.at(spec, t, a, w, r));
        if (std::fabs(other.value() - first.value()) > tol) {
          std::ostringstream detail;
          detail << "action marginal at (t'=" << t << ", a'=" << a << ") depends on w";
          out.push_back({"marginal_consistency", detail.str()});
        }
      }
    }
  }
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      for (std::size_t w = 0; w < wn; ++w) {
        for (std::size_t r = 0; r < rn; ++r) {
          if (!feasible[w * rn + r] && m.at(spec, t, a, w, r) != 0.0) {
            std::ostringstream detail;
            detail << "mass on infeasible reward (w=" << w << ", r=" << r << ")";
            out.push_back({"support", detail.str()});
          }
        }
      }
    }
  }
  return out;
}

MechanismZ compose_mechanism(const MechanismFactored& m, const GameSpec& spec) {
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  std::vector<char> feasible(wn * rn, 0);
  for (std::size_t w = 0; w < wn; ++w) {
    for (int r : spec.feasible_rewards[w]) feasible[w * rn + r] = 1;
  }
  MechanismZ out;
  out.team = m.team;
  out.z.assign(tn * an * wn * rn, 0.0);
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      const double alpha = m.alpha.at(t, a);
      for (std::size_t w = 0; w < wn; ++w) {
        const std::size_t row = (t * an + a) * wn + w;
        for (std::size_t r = 0; r < rn; ++r) {
          const double kappa = m.kappa.at(row, r);
          if (kappa > 0.0 && !feasible[w * rn + r]) {
            throw std::invalid_argument("reward kernel places mass outside the feasible set");
          }
          out.z[(row)*rn + r] = alpha * kappa;
        }
      }
    }
  }
  return out;
}

MechanismFactored factor_mechanism(const MechanismZ& m, const GameSpec& spec) {
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();

  MechanismFactored out;
  out.team = m.team;
  out.alpha = Kernel::zeros(ProductIndex({static_cast<int>(tn)}), an);
  out.kappa = Kernel::zeros(
      ProductIndex({static_cast<int>(tn), static_cast<int>(an), static_cast<int>(wn)}), rn);

  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      NeumaierSum alpha_sum;
      for (std::size_t r = 0; r < rn; ++r) alpha_sum.add(m.at(spec, t, a, 0, r));
      const double alpha = alpha_sum.value();
      out.alpha.at(t, a) = alpha;
      for (std::size_t w = 0; w < wn; ++w) {
        const std::size_t row = (t * an + a) * wn + w;
        if (alpha > 1e-12) {
          for (std::size_t r = 0; r < rn; ++r) {
            out.kappa.at(row, r) = m.at(spec, t, a, w, r) / alpha;
          }
        } else {
          // unreachable recommendation: default to uniform over the feasible set
          const auto& feas = spec.feasible_rewards[w];
          const double u = 1.0 / static_cast<double>(feas.size());
          for (int r : feas) out.kappa.at(row, r) = u;
        }
      }
    }
  }
  return out;
}

double action_marginal(const GameSpec& spec, const MechanismZ& m, int team_types,
                       int team_actions) {
  NeumaierSum sum;
  const std::size_t rn = spec.team_reward_count();
  for (std::size_t r = 0; r < rn; ++r) {
    sum.add(m.at(spec, team_types, team_actions, 0, r));
  }
  return sum.value();
}

}  // namespace teamgame
