#include "teamgame/laws.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace teamgame {

namespace {

void require_profile(const GameSpec& spec, const std::vector<MechanismZ>& profile) {
  if (profile.size() != static_cast<std::size_t>(spec.teams)) {
    throw std::invalid_argument("profile needs one mechanism per team");
  }
  const std::size_t zsize = spec.z_index().size();
  for (int j = 0; j < spec.teams; ++j) {
    if (profile[j].team != j || profile[j].z.size() != zsize) {
      throw std::invalid_argument("profile mechanism does not match its team or the game");
    }
  }
}

void require_agent(const GameSpec& spec, int team, int member) {
  if (team < 0 || team >= spec.teams || member < 0 || member >= spec.members) {
    throw std::invalid_argument("agent outside the game");
  }
}

void require_cells(std::size_t cells) {
  if (cells > law_cell_cap()) {
    std::ostringstream msg;
    msg << "law would need " << cells << " cells, above the cap of " << law_cell_cap();
    throw cell_cap_error(msg.str());
  }
}

}  // namespace

bool DeviationStrategy::is_truthful(const GameSpec& spec) const {
  for (int t = 0; t < spec.type_space.size(); ++t) {
    if (report_map[t] != t) return false;
  }
  if (decision_rule) {
    for (int t = 0; t < spec.type_space.size(); ++t) {
      for (int a = 0; a < spec.action_space.size(); ++a) {
        if ((*decision_rule)[t * spec.action_space.size() + a] != a) return false;
      }
    }
  }
  return true;
}

DeviationStrategy DeviationStrategy::truthful(const GameSpec& spec, int team, int member) {
  DeviationStrategy s;
  s.team = team;
  s.member = member;
  s.report_map.resize(spec.type_space.size());
  for (int t = 0; t < spec.type_space.size(); ++t) s.report_map[t] = t;
  if (!spec.obedience_enforced) {
    std::vector<int> rule(spec.type_space.size() * spec.action_space.size());
    for (int t = 0; t < spec.type_space.size(); ++t) {
      for (int a = 0; a < spec.action_space.size(); ++a) {
        rule[t * spec.action_space.size() + a] = a;
      }
    }
    s.decision_rule = std::move(rule);
  }
  return s;
}

OutcomeLaw truthful_law(const GameSpec& spec, const std::vector<MechanismZ>& profile) {
  require_profile(spec, profile);
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rc = spec.full_reward_count();
  require_cells(tc * ac * wc * rc);

  OutcomeLaw law;
  law.mass.assign(tc * ac * wc * rc, 0.0);
  for (std::size_t t = 0; t < tc; ++t) {
    const double h = spec.prior.mass[t];
    if (h == 0.0) continue;
    for (std::size_t a = 0; a < ac; ++a) {
      const std::size_t wrow = t * ac + a;
      for (std::size_t w = 0; w < wc; ++w) {
        const double lam = spec.winnings.at(wrow, w);
        if (lam == 0.0) continue;
        const double base = h * lam;
        for (std::size_t r = 0; r < rc; ++r) {
          double mass = base;
          for (int j = 0; j < spec.teams && mass != 0.0; ++j) {
            mass *= profile[j].at(spec, spec.team_type_block(t, j), spec.team_action_block(a, j),
                                  spec.winnings_component(w, j), spec.team_reward_block(r, j));
          }
          if (mass != 0.0) law.mass[((t * ac + a) * wc + w) * rc + r] = mass;
        }
      }
    }
  }
  return law;
}

namespace {

/// Shared composition core: report and action kernels may be stochastic.
/// The per-team alpha*kappa product collapses to a single z lookup because
/// both factors condition on the same reported types, so the whole mass is
/// prior * report * action * winnings * prod_j z_j.
ExtendedLaw compose_deviation(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                              int team, int member, const std::vector<double>& report_kernel,
                              const std::vector<double>& action_kernel) {
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rc = spec.full_reward_count();
  require_cells(tc * ac * wc * rc * static_cast<std::size_t>(nt) * static_cast<std::size_t>(na));

  const int agent = spec.agent_id(team, member);
  const bool obedient_mode = spec.obedience_enforced;

  ExtendedLaw law;
  law.team = team;
  law.member = member;
  law.mass.assign(tc * ac * wc * rc * nt * na, 0.0);

  // alpha marginals, used only to prune unreachable recommendations
  std::vector<std::vector<double>> alpha(spec.teams);
  const std::size_t team_tn = spec.team_type_count();
  const std::size_t team_an = spec.team_action_count();
  for (int j = 0; j < spec.teams; ++j) {
    alpha[j].resize(team_tn * team_an);
    for (std::size_t tt = 0; tt < team_tn; ++tt) {
      for (std::size_t aa = 0; aa < team_an; ++aa) {
        alpha[j][tt * team_an + aa] = action_marginal(spec, profile[j], tt, aa);
      }
    }
  }

  std::vector<int> tblocks(spec.teams);
  for (std::size_t t = 0; t < tc; ++t) {
    const double h = spec.prior.mass[t];
    if (h == 0.0) continue;
    const int true_type = spec.agent_type(t, agent);
    for (int report = 0; report < nt; ++report) {
      const double p_report = report_kernel[true_type * nt + report];
      if (p_report == 0.0) continue;
      for (int j = 0; j < spec.teams; ++j) tblocks[j] = spec.team_type_block(t, j);
      tblocks[team] = spec.replace_member_type(tblocks[team], member, report);
      for (std::size_t a = 0; a < ac; ++a) {
        bool reachable = true;
        for (int j = 0; j < spec.teams; ++j) {
          if (alpha[j][static_cast<std::size_t>(tblocks[j]) * team_an +
                       spec.team_action_block(a, j)] == 0.0) {
            reachable = false;
            break;
          }
        }
        if (!reachable) continue;
        const int recommended = spec.agent_action(a, agent);
        for (int actual = 0; actual < na; ++actual) {
          double scale = h * p_report;
          if (obedient_mode) {
            if (actual != recommended) continue;
          } else {
            const double q =
                action_kernel[((true_type * nt + report) * na + recommended) * na + actual];
            if (q == 0.0) continue;
            scale *= q;
          }
          // winnings realize on true types and implemented actions
          const std::size_t implemented = spec.replace_agent_action(a, agent, actual);
          const std::size_t wrow = t * ac + implemented;
          for (std::size_t w = 0; w < wc; ++w) {
            const double lam = spec.winnings.at(wrow, w);
            if (lam == 0.0) continue;
            const double base = scale * lam;
            for (std::size_t r = 0; r < rc; ++r) {
              // rewards realize on reported types and recommended actions
              double mass = base;
              for (int j = 0; j < spec.teams && mass != 0.0; ++j) {
                mass *= profile[j].at(spec, tblocks[j], spec.team_action_block(a, j),
                                      spec.winnings_component(w, j), spec.team_reward_block(r, j));
              }
              if (mass != 0.0) {
                const std::size_t cell =
                    ((((t * ac + a) * wc + w) * rc + r) * nt + report) * na + actual;
                law.mass[cell] += mass;
              }
            }
          }
        }
      }
    }
  }
  return law;
}

}  // namespace

ExtendedLaw deviation_law(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                          const DeviationStrategy& strategy) {
  require_profile(spec, profile);
  require_agent(spec, strategy.team, strategy.member);
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  if (static_cast<int>(strategy.report_map.size()) != nt) {
    throw std::invalid_argument("report map must cover every type");
  }
  if (spec.obedience_enforced && strategy.decision_rule) {
    // a supplied identity rule is harmless; anything else is a mode mismatch
    for (int t = 0; t < nt; ++t) {
      for (int a = 0; a < na; ++a) {
        if ((*strategy.decision_rule)[t * na + a] != a) {
          throw std::invalid_argument(
              "action deviation supplied while the game enforces obedience");
        }
      }
    }
  }
  if (!spec.obedience_enforced && !strategy.decision_rule) {
    throw std::invalid_argument("decision rule required outside obedience-enforced mode");
  }

  std::vector<double> report_kernel(nt * nt, 0.0);
  for (int t = 0; t < nt; ++t) report_kernel[t * nt + strategy.report_map[t]] = 1.0;
  std::vector<double> action_kernel;
  if (!spec.obedience_enforced) {
    action_kernel.assign(static_cast<std::size_t>(nt) * nt * na * na, 0.0);
    for (int t = 0; t < nt; ++t) {
      for (int rep = 0; rep < nt; ++rep) {
        for (int a = 0; a < na; ++a) {
          action_kernel[((t * nt + rep) * na + a) * na + (*strategy.decision_rule)[t * na + a]] =
              1.0;
        }
      }
    }
  }
  return compose_deviation(spec, profile, strategy.team, strategy.member, report_kernel,
                           action_kernel);
}

ExtendedLaw deviation_law_stochastic(const GameSpec& spec, const std::vector<MechanismZ>& profile,
                                     int team, int member,
                                     const std::vector<double>& report_kernel,
                                     const std::vector<double>& action_kernel) {
  require_profile(spec, profile);
  require_agent(spec, team, member);
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  if (report_kernel.size() != static_cast<std::size_t>(nt) * nt) {
    throw std::invalid_argument("report kernel must be |T| x |T|");
  }
  if (spec.obedience_enforced) {
    if (!action_kernel.empty()) {
      throw std::invalid_argument("action deviation supplied while the game enforces obedience");
    }
  } else if (action_kernel.size() != static_cast<std::size_t>(nt) * nt * na * na) {
    throw std::invalid_argument("action kernel must be (|T|*|T|*|A|) x |A|");
  }
  return compose_deviation(spec, profile, team, member, report_kernel, action_kernel);
}

OutcomeLaw project(const GameSpec& spec, const ExtendedLaw& law) {
  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  const std::size_t tc = spec.full_type_count();
  const std::size_t ac = spec.full_action_count();
  const std::size_t wc = spec.winnings_profile_count();
  const std::size_t rc = spec.full_reward_count();
  const int agent = spec.agent_id(law.team, law.member);

  OutcomeLaw out;
  out.mass.assign(tc * ac * wc * rc, 0.0);
  std::size_t cell = 0;
  for (std::size_t t = 0; t < tc; ++t) {
    for (std::size_t a = 0; a < ac; ++a) {
      for (std::size_t w = 0; w < wc; ++w) {
        for (std::size_t r = 0; r < rc; ++r) {
          for (int report = 0; report < nt; ++report) {
            for (int actual = 0; actual < na; ++actual, ++cell) {
              const double m = law.mass[cell];
              if (m == 0.0) continue;
              const std::size_t implemented = spec.replace_agent_action(a, agent, actual);
              out.mass[((t * ac + implemented) * wc + w) * rc + r] += m;
            }
          }
        }
      }
    }
  }
  return out;
}

double deviation_generator_count(const GameSpec& spec) {
  const double nt = spec.type_space.size();
  const double na = spec.action_space.size();
  double count = std::pow(nt, nt);
  if (!spec.obedience_enforced) count *= std::pow(na, nt * na);
  return count;
}

std::vector<DeviationStrategy> deviation_generators(const GameSpec& spec,
                                                    const std::vector<MechanismZ>& profile,
                                                    int team, int member, std::size_t cap) {
  require_profile(spec, profile);
  require_agent(spec, team, member);
  const double count = deviation_generator_count(spec);
  if (count > static_cast<double>(cap)) {
    std::ostringstream msg;
    msg << "deviation enumeration needs " << count << " strategies, above the cap of " << cap;
    throw generator_cap_error(msg.str());
  }

  const int nt = spec.type_space.size();
  const int na = spec.action_space.size();
  std::size_t report_count = 1;
  for (int t = 0; t < nt; ++t) report_count *= static_cast<std::size_t>(nt);
  std::size_t rule_count = 1;
  if (!spec.obedience_enforced) {
    for (int k = 0; k < nt * na; ++k) rule_count *= static_cast<std::size_t>(na);
  }

  std::vector<DeviationStrategy> out;
  out.reserve(report_count * rule_count);
  for (std::size_t rcode = 0; rcode < report_count; ++rcode) {
    DeviationStrategy base;
    base.team = team;
    base.member = member;
    base.report_map.resize(nt);
    std::size_t rest = rcode;
    for (int t = nt - 1; t >= 0; --t) {
      base.report_map[t] = static_cast<int>(rest % nt);
      rest /= nt;
    }
    if (spec.obedience_enforced) {
      out.push_back(base);
      continue;
    }
    for (std::size_t dcode = 0; dcode < rule_count; ++dcode) {
      DeviationStrategy s = base;
      std::vector<int> rule(nt * na);
      std::size_t drest = dcode;
      for (int k = nt * na - 1; k >= 0; --k) {
        rule[k] = static_cast<int>(drest % na);
        drest /= na;
      }
      s.decision_rule = std::move(rule);
      out.push_back(std::move(s));
    }
  }
  return out;
}

double expected_value(const OutcomeLaw& law, std::span<const double> table) {
  if (law.mass.size() != table.size()) {
    throw std::invalid_argument("utility table does not match the outcome index");
  }
  NeumaierSum sum;
  for (std::size_t x = 0; x < law.mass.size(); ++x) {
    if (law.mass[x] != 0.0) sum.add(law.mass[x] * table[x]);
  }
  return sum.value();
}

double expected_value(const GameSpec& spec, const ExtendedLaw& law,
                      std::span<const double> table) {
  return expected_value(project(spec, law), table);
}

}  // namespace teamgame
