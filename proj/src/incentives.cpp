#include "teamgame/incentives.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace teamgame {

bool DeviationScenario::is_truthful(int na) const {
  if (report != true_type) return false;
  for (int a = 0; a < static_cast<int>(rule.size()); ++a) {
    if (rule[a] != a) return false;
  }
  (void)na;
  return true;
}

std::string DeviationScenario::describe(const GameSpec& spec) const {
  std::ostringstream out;
  out << "member " << member << ", type " << spec.type_space.labels[true_type] << " -> report "
      << spec.type_space.labels[report];
  if (!rule.empty()) {
    out << ", actions";
    for (int a = 0; a < static_cast<int>(rule.size()); ++a) {
      out << ' ' << spec.action_space.labels[a] << "->" << spec.action_space.labels[rule[a]];
    }
  }
  return out.str();
}

double ConstraintRow::evaluate(std::span<const double> z) const {
  NeumaierSum sum;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] != 0.0) sum.add(coeffs[k] * z[k]);
  }
  return sum.value();
}

std::size_t ConstraintSystem::count(RowKind kind) const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row.kind == kind) ++n;
  }
  return n;
}

std::string ConstraintSystem::to_tableau(const GameSpec& spec) const {
  std::ostringstream out;
  const ProductIndex zidx = spec.z_index();
  out << "# team " << team << ", columns: z(t',a',w,r) in index order\n";
  out << "# kind";
  for (std::size_t k = 0; k < variables; ++k) {
    const auto tup = zidx.tuple_of(k);
    out << " z(" << tup[0] << ',' << tup[1] << ',' << tup[2] << ',' << tup[3] << ')';
  }
  out << " rel rhs\n";
  for (const auto& row : rows) {
    switch (row.kind) {
      case RowKind::normalization: out << "normalization"; break;
      case RowKind::marginal_consistency: out << "marginal-consistency"; break;
      case RowKind::support_zero: out << "support-zero"; break;
      case RowKind::incentive:
        out << "IC(" << row.scenario->describe(spec)
            << (row.zero_probability_type ? ", zero-probability type" : "") << ')';
        break;
    }
    for (double c : row.coeffs) out << ' ' << c;
    out << (row.equality ? " = " : " >= ") << row.rhs << '\n';
  }
  return out.str();
}

std::vector<DeviationScenario> interim_scenarios(const GameSpec& spec, int member, int true_type) {
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  std::vector<DeviationScenario> out;
  std::size_t rule_count = 1;
  if (!spec.obedience_enforced) {
    for (int a = 0; a < na; ++a) rule_count *= static_cast<std::size_t>(na);
  }
  for (int report = 0; report < nt; ++report) {
    for (std::size_t code = 0; code < rule_count; ++code) {
      DeviationScenario s;
      s.member = member;
      s.true_type = true_type;
      s.report = report;
      if (!spec.obedience_enforced) {
        s.rule.resize(na);
        std::size_t rest = code;
        for (int a = na - 1; a >= 0; --a) {
          s.rule[a] = static_cast<int>(rest % na);
          rest /= na;
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<double> scenario_coefficients(const GameSpec& spec,
                                          const std::vector<MechanismZ>& profile, int team,
                                          const DeviationScenario& scenario) {
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rn = spec.team_reward_count();
  const std::size_t team_an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const int agent = spec.agent_id(team, scenario.member);

  std::vector<double> coeffs(spec.z_index().size(), 0.0);

  // rival alpha marginals
  std::vector<std::vector<double>> alpha(spec.teams);
  const std::size_t team_tn = spec.team_type_count();
  for (int j = 0; j < spec.teams; ++j) {
    if (j == team) continue;
    alpha[j].resize(team_tn * team_an);
    for (std::size_t tt = 0; tt < team_tn; ++tt) {
      for (std::size_t aa = 0; aa < team_an; ++aa) {
        alpha[j][tt * team_an + aa] = action_marginal(spec, profile[j], tt, aa);
      }
    }
  }

  for (std::size_t t = 0; t < tc; ++t) {
    if (spec.agent_type(t, agent) != scenario.true_type) continue;
    const double h = spec.prior.mass[t];
    if (h == 0.0) continue;
    const int reported_block =
        spec.replace_member_type(spec.team_type_block(t, team), scenario.member, scenario.report);
    for (std::size_t a = 0; a < ac; ++a) {
      double pother = h;
      for (int j = 0; j < spec.teams && pother != 0.0; ++j) {
        if (j == team) continue;
        pother *= alpha[j][static_cast<std::size_t>(spec.team_type_block(t, j)) * team_an +
                           spec.team_action_block(a, j)];
      }
      if (pother == 0.0) continue;
      const int recommended = spec.agent_action(a, agent);
      const int actual = scenario.rule.empty() ? recommended : scenario.rule[recommended];
      const std::size_t implemented = spec.replace_agent_action(a, agent, actual);
      const std::size_t own_ablock = spec.team_action_block(a, team);
      const std::size_t wrow = t * ac + implemented;
      for (std::size_t w = 0; w < wc; ++w) {
        const double lam = spec.winnings.at(wrow, w);
        if (lam == 0.0) continue;
        const double weight = pother * lam;
        const int w_own = spec.winnings_component(w, team);
        const std::size_t base =
            ((static_cast<std::size_t>(reported_block) * team_an + own_ablock) * wn + w_own) * rn;
        for (std::size_t r = 0; r < rn; ++r) {
          const double u = spec.member_utility_at(agent, t, implemented, w, static_cast<int>(r));
          if (u != 0.0) coeffs[base + r] += weight * u;
        }
      }
    }
  }
  return coeffs;
}

std::vector<double> principal_objective(const GameSpec& spec,
                                        const std::vector<MechanismZ>& profile, int team) {
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rn = spec.team_reward_count();
  const std::size_t team_an = spec.team_action_count();
  const std::size_t team_tn = spec.team_type_count();
  const std::size_t wn = spec.winnings_space.size();

  std::vector<double> coeffs(spec.z_index().size(), 0.0);
  std::vector<std::vector<double>> alpha(spec.teams);
  for (int j = 0; j < spec.teams; ++j) {
    if (j == team) continue;
    alpha[j].resize(team_tn * team_an);
    for (std::size_t tt = 0; tt < team_tn; ++tt) {
      for (std::size_t aa = 0; aa < team_an; ++aa) {
        alpha[j][tt * team_an + aa] = action_marginal(spec, profile[j], tt, aa);
      }
    }
  }

  for (std::size_t t = 0; t < tc; ++t) {
    const double h = spec.prior.mass[t];
    if (h == 0.0) continue;
    const std::size_t own_tblock = spec.team_type_block(t, team);
    for (std::size_t a = 0; a < ac; ++a) {
      double pother = h;
      for (int j = 0; j < spec.teams && pother != 0.0; ++j) {
        if (j == team) continue;
        pother *= alpha[j][static_cast<std::size_t>(spec.team_type_block(t, j)) * team_an +
                           spec.team_action_block(a, j)];
      }
      if (pother == 0.0) continue;
      const std::size_t own_ablock = spec.team_action_block(a, team);
      const std::size_t wrow = t * ac + a;
      for (std::size_t w = 0; w < wc; ++w) {
        const double lam = spec.winnings.at(wrow, w);
        if (lam == 0.0) continue;
        const double value = pother * lam * spec.principal_utility_at(team, t, a, w);
        if (value == 0.0) continue;
        const int w_own = spec.winnings_component(w, team);
        const std::size_t base =
            ((own_tblock * team_an + own_ablock) * wn + w_own) * rn;
        // the payoff does not depend on rewards: spread uniformly over the
        // row so that coeffs . z reproduces value * alpha for any valid z
        for (std::size_t r = 0; r < rn; ++r) coeffs[base + r] += value;
      }
    }
  }
  return coeffs;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  NeumaierSum sum;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != 0.0 && b[k] != 0.0) sum.add(a[k] * b[k]);
  }
  return sum.value();
}

}  // namespace

SlackReport ic_slack_report(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team,
                            int member) {
  if (team < 0 || team >= spec.teams || member < 0 || member >= spec.members) {
    throw std::invalid_argument("agent outside the game");
  }
  const int nt = spec.type_space.size();
  SlackReport report;
  NeumaierSum slack;
  double worst_gap = -1.0;
  for (int t = 0; t < nt; ++t) {
    const auto scenarios = interim_scenarios(spec, member, t);
    double truth_value = 0.0;
    double best_value = 0.0;
    const DeviationScenario* best = nullptr;
    bool first = true;
    for (const auto& s : scenarios) {
      const double v = dot(scenario_coefficients(spec, profile, team, s), profile[team].z);
      if (s.is_truthful(spec.action_space.size())) truth_value = v;
      if (first || v > best_value) {
        best_value = v;
        best = &s;
        first = false;
      }
    }
    slack.add(truth_value - best_value);
    const double gap = best_value - truth_value;
    if (gap > worst_gap) {
      worst_gap = gap;
      report.worst = *best;
    }
  }
  report.slack = slack.value();
  return report;
}

double ic_slack(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team,
                int member) {
  return ic_slack_report(spec, profile, team, member).slack;
}

ConstraintSystem ic_constraints(const GameSpec& spec, const std::vector<MechanismZ>& others,
                                int team) {
  const std::size_t tn = spec.team_type_count();
  const std::size_t an = spec.team_action_count();
  const std::size_t wn = spec.winnings_space.size();
  const std::size_t rn = spec.team_reward_count();
  const std::size_t nvars = tn * an * wn * rn;

  ConstraintSystem system;
  system.team = team;
  system.variables = nvars;

  auto zpos = [&](std::size_t t, std::size_t a, std::size_t w, std::size_t r) {
    return ((t * an + a) * wn + w) * rn + r;
  };

  // (a) normalization per (t', w)
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t w = 0; w < wn; ++w) {
      ConstraintRow row;
      row.kind = RowKind::normalization;
      row.coeffs.assign(nvars, 0.0);
      row.rhs = 1.0;
      for (std::size_t a = 0; a < an; ++a) {
        for (std::size_t r = 0; r < rn; ++r) row.coeffs[zpos(t, a, w, r)] = 1.0;
      }
      system.rows.push_back(std::move(row));
    }
  }
  // (b) the action marginal may not depend on w
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      for (std::size_t w = 1; w < wn; ++w) {
        ConstraintRow row;
        row.kind = RowKind::marginal_consistency;
        row.coeffs.assign(nvars, 0.0);
        row.rhs = 0.0;
        for (std::size_t r = 0; r < rn; ++r) {
          row.coeffs[zpos(t, a, w, r)] += 1.0;
          row.coeffs[zpos(t, a, 0, r)] -= 1.0;
        }
        system.rows.push_back(std::move(row));
      }
    }
  }
  // (c) zero mass outside the feasible reward set
  std::vector<char> feasible(wn * rn, 0);
  for (std::size_t w = 0; w < wn; ++w) {
    for (int r : spec.feasible_rewards[w]) feasible[w * rn + r] = 1;
  }
  for (std::size_t t = 0; t < tn; ++t) {
    for (std::size_t a = 0; a < an; ++a) {
      for (std::size_t w = 0; w < wn; ++w) {
        for (std::size_t r = 0; r < rn; ++r) {
          if (feasible[w * rn + r]) continue;
          ConstraintRow row;
          row.kind = RowKind::support_zero;
          row.coeffs.assign(nvars, 0.0);
          row.rhs = 0.0;
          row.coeffs[zpos(t, a, w, r)] = 1.0;
          system.rows.push_back(std::move(row));
        }
      }
    }
  }
  // (d) incentive rows: truthful coefficients minus deviation coefficients
  for (int member = 0; member < spec.members; ++member) {
    const int agent = spec.agent_id(team, member);
    for (int true_type = 0; true_type < spec.type_space.size(); ++true_type) {
      NeumaierSum type_mass;
      for (std::size_t t = 0; t < spec.full_type_count(); ++t) {
        if (spec.agent_type(t, agent) == true_type) type_mass.add(spec.prior.mass[t]);
      }
      const bool unreachable_type = type_mass.value() == 0.0;
      DeviationScenario truthful;
      truthful.member = member;
      truthful.true_type = true_type;
      truthful.report = true_type;
      if (!spec.obedience_enforced) {
        truthful.rule.resize(spec.action_space.size());
        for (int a = 0; a < spec.action_space.size(); ++a) truthful.rule[a] = a;
      }
      const std::vector<double> truth_coeffs =
          scenario_coefficients(spec, others, team, truthful);
      for (const auto& s : interim_scenarios(spec, member, true_type)) {
        if (s.is_truthful(spec.action_space.size())) continue;
        ConstraintRow row;
        row.kind = RowKind::incentive;
        row.equality = false;
        row.rhs = 0.0;
        row.scenario = s;
        row.zero_probability_type = unreachable_type;
        row.coeffs = scenario_coefficients(spec, others, team, s);
        for (std::size_t k = 0; k < nvars; ++k) {
          row.coeffs[k] = truth_coeffs[k] - row.coeffs[k];
        }
        system.rows.push_back(std::move(row));
      }
    }
  }
  return system;
}

IcCheck is_incentive_compatible(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                                double tol) {
  IcCheck check;
  bool first = true;
  for (int j = 0; j < spec.teams; ++j) {
    for (int i = 0; i < spec.members; ++i) {
      SlackReport report = ic_slack_report(spec, profile, j, i);
      if (first || report.slack < check.min_slack) {
        check.min_slack = report.slack;
        check.worst_team = j;
        check.worst_member = i;
        check.worst = report.worst;
        first = false;
      }
    }
  }
  check.ok = check.min_slack >= -tol;
  return check;
}

}  // namespace teamgame
