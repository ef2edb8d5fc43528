#include "teamgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace teamgame {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;

/// Dense tableau simplex over equality rows with nonnegative variables.
class SimplexTableau {
 public:
  // rows: m x n coefficient matrix with rhs >= 0 required before phase 1
  SimplexTableau(std::vector<std::vector<double>> rows, std::vector<double> rhs)
      : a_(std::move(rows)), b_(std::move(rhs)), m_(a_.size()), n_(a_.empty() ? 0 : a_[0].size()) {}

  // appends artificial columns, runs phase 1, returns the residual infeasibility
  double phase1() {
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      a_[i].resize(n_ + m_, 0.0);
      a_[i][n_ + i] = 1.0;
      basis_[i] = n_ + i;
    }
    ncols_ = n_ + m_;
    // objective: maximize -(sum of artificials); priced out against the
    // starting basis this is sum of all rows
    obj_.assign(ncols_ + 1, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) obj_[j] += a_[i][j];
      obj_[ncols_] += b_[i];
    }
    iterate();
    const double infeasibility = obj_[ncols_];
    drive_out_artificials();
    return infeasibility;
  }

  // phase 2 with the real objective (maximize c . v over all columns)
  void phase2(const std::vector<double>& cost) {
    obj_.assign(ncols_ + 1, 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = cost[j];
    // price out the current basis
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = basis_[i] < n_ ? cost[basis_[i]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) obj_[j] -= cb * a_[i][j];
      obj_[ncols_] -= cb * b_[i];
    }
    unbounded_ = false;
    iterate();
  }

  bool unbounded() const { return unbounded_; }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = b_[i];
    }
    return x;
  }

 private:
  void pivot(std::size_t row, std::size_t col) {
    const double p = a_[row][col];
    for (std::size_t j = 0; j < ncols_; ++j) a_[row][j] /= p;
    b_[row] /= p;
    a_[row][col] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = a_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) a_[i][j] -= f * a_[row][j];
      a_[i][col] = 0.0;
      b_[i] -= f * b_[row];
      if (std::fabs(b_[i]) < 1e-14) b_[i] = 0.0;
      if (b_[i] < 0.0) b_[i] = 0.0;  // clip ratio-test dust
    }
    const double f = obj_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j < ncols_; ++j) obj_[j] -= f * a_[row][j];
      obj_[col] = 0.0;
      obj_[ncols_] -= f * b_[row];
    }
    basis_[row] = col;
  }

  void iterate() {
    const std::size_t pivot_budget = 10000 * (m_ + ncols_ + 1);
    for (std::size_t pivots = 0; pivots <= pivot_budget; ++pivots) {
      // Bland: lowest-index column with positive reduced cost
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (blocked_.size() > j && blocked_[j]) continue;
        if (obj_[j] > kReducedCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == ncols_) return;
      std::size_t leave = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][enter] <= kPivotTol) continue;
        const double ratio = b_[i] / a_[i][enter];
        if (leave == m_ || ratio < best_ratio - 1e-15 ||
            (std::fabs(ratio - best_ratio) <= 1e-15 && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) {
        unbounded_ = true;
        return;
      }
      pivot(leave, enter);
    }
    throw solver_error("simplex exceeded its pivot budget");
  }

  void drive_out_artificials() {
    blocked_.assign(ncols_, false);
    for (std::size_t j = n_; j < ncols_; ++j) blocked_[j] = true;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      // replace a basic artificial by any structural column with a usable pivot
      std::size_t col = ncols_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::fabs(a_[i][j]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col != ncols_) {
        pivot(i, col);
      } else {
        // redundant row: zero it so it can never pivot again
        std::fill(a_[i].begin(), a_[i].end(), 0.0);
        b_[i] = 0.0;
      }
    }
  }

  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<double> obj_;
  std::vector<char> blocked_;
  bool unbounded_ = false;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t nx = lp.objective.size();
  if (lp.constraints.variables != nx) {
    throw std::invalid_argument("objective length does not match the constraint variables");
  }

  // layout: x (nx) | upper-bound slacks (nx) | one surplus per inequality row
  std::size_t n_ineq = 0;
  for (const auto& row : lp.constraints.rows) {
    if (!row.equality) ++n_ineq;
  }
  const std::size_t ncols = nx + nx + n_ineq;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.reserve(lp.constraints.rows.size() + nx);
  std::size_t surplus = nx + nx;
  for (const auto& row : lp.constraints.rows) {
    std::vector<double> r(ncols, 0.0);
    for (std::size_t j = 0; j < nx; ++j) r[j] = row.coeffs[j];
    double b = row.rhs;
    if (!row.equality) r[surplus++] = -1.0;  // coeffs . x - s = rhs
    if (b < 0.0) {
      for (double& v : r) v = -v;
      b = -b;
    }
    rows.push_back(std::move(r));
    rhs.push_back(b);
  }
  for (std::size_t j = 0; j < nx; ++j) {
    std::vector<double> r(ncols, 0.0);
    r[j] = 1.0;
    r[nx + j] = 1.0;  // x_j + slack = 1
    rows.push_back(std::move(r));
    rhs.push_back(1.0);
  }

  SimplexTableau tableau(std::move(rows), std::move(rhs));
  LpResult result;
  if (tableau.phase1() > kFeasTol) {
    result.status = LpStatus::infeasible;
    return result;
  }
  std::vector<double> cost(ncols, 0.0);
  for (std::size_t j = 0; j < nx; ++j) cost[j] = lp.objective[j];
  tableau.phase2(cost);
  if (tableau.unbounded()) {
    result.status = LpStatus::unbounded;
    return result;
  }
  std::vector<double> full = tableau.solution();
  result.solution.assign(full.begin(), full.begin() + nx);
  for (double& v : result.solution) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
  }
  NeumaierSum value;
  for (std::size_t j = 0; j < nx; ++j) {
    if (lp.objective[j] != 0.0) value.add(lp.objective[j] * result.solution[j]);
  }
  result.status = LpStatus::optimal;
  result.value = value.value();
  return result;
}

bool ic_feasible(const GameSpec& spec, const std::vector<MechanismZ>& others, int team) {
  LinearProgram lp;
  lp.constraints = ic_constraints(spec, others, team);
  lp.objective.assign(lp.constraints.variables, 0.0);
  return solve_lp(lp).status == LpStatus::optimal;
}

BestResponse best_response(const GameSpec& spec, const std::vector<MechanismZ>& others, int team) {
  LinearProgram lp;
  lp.constraints = ic_constraints(spec, others, team);
  lp.objective = principal_objective(spec, others, team);
  LpResult result = solve_lp(lp);
  if (result.status == LpStatus::infeasible) {
    std::ostringstream msg;
    msg << "team " << team
        << " has no incentive-compatible mechanism against the given rivals; the search "
           "needs a mechanism that stays feasible at every rival profile";
    throw solver_error(msg.str());
  }
  if (result.status == LpStatus::unbounded) {
    throw solver_error("best-response program is unbounded; the mechanism polytope is broken");
  }
  BestResponse br;
  br.mechanism.team = team;
  br.mechanism.z = std::move(result.solution);
  br.value = result.value;
  return br;
}

double principal_value(const GameSpec& spec, const std::vector<MechanismZ>& profile, int team) {
  const std::vector<double> objective = principal_objective(spec, profile, team);
  NeumaierSum sum;
  for (std::size_t k = 0; k < objective.size(); ++k) {
    if (objective[k] != 0.0) sum.add(objective[k] * profile[team].z[k]);
  }
  return sum.value();
}

BnpeCheck verify_bnpe(const GameSpec& spec, const std::vector<MechanismZ>& profile, double tol) {
  BnpeCheck check;
  for (int j = 0; j < spec.teams; ++j) {
    auto violations = validate_mechanism(spec, profile[j], std::max(tol, kMassTol));
    for (auto& v : violations) check.mechanism_violations.push_back(std::move(v));
  }
  check.feasible = check.mechanism_violations.empty();
  check.ic = is_incentive_compatible(spec, profile, tol);
  check.incentive_compatible = check.ic.ok;
  check.current_values.resize(spec.teams);
  check.best_response_values.resize(spec.teams);
  check.best_responding = true;
  for (int j = 0; j < spec.teams; ++j) {
    check.current_values[j] = principal_value(spec, profile, j);
    check.best_response_values[j] = best_response(spec, profile, j).value;
    if (check.best_response_values[j] > check.current_values[j] + tol) {
      check.best_responding = false;
    }
  }
  return check;
}

namespace {

std::vector<long long> profile_key(const std::vector<MechanismZ>& profile, int mover,
                                   double rounding) {
  std::vector<long long> key;
  key.push_back(mover);
  for (const auto& m : profile) {
    for (double v : m.z) key.push_back(llround(v / rounding));
  }
  return key;
}

double profile_distance(const std::vector<MechanismZ>& a, const std::vector<MechanismZ>& b) {
  double out = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t k = 0; k < a[j].z.size(); ++k) {
      out = std::max(out, std::fabs(a[j].z[k] - b[j].z[k]));
    }
  }
  return out;
}

void damped_update(MechanismZ& current, const MechanismZ& br, double damping) {
  if (damping >= 1.0) {
    current.z = br.z;
    return;
  }
  for (std::size_t k = 0; k < current.z.size(); ++k) {
    current.z[k] = damping * br.z[k] + (1.0 - damping) * current.z[k];
  }
}

EquilibriumReport make_report(const GameSpec& spec, std::vector<MechanismZ> profile,
                              EquilibriumReport::Status status, int rounds) {
  EquilibriumReport report;
  report.status = status;
  report.rounds_used = rounds;
  report.principal_values.resize(spec.teams);
  for (int j = 0; j < spec.teams; ++j) report.principal_values[j] = principal_value(spec, profile, j);
  for (int j = 0; j < spec.teams; ++j) {
    for (int i = 0; i < spec.members; ++i) {
      report.agent_min_slacks.push_back(ic_slack(spec, profile, j, i));
    }
  }
  report.profile = std::move(profile);
  return report;
}

}  // namespace

DynamicsResult best_response_dynamics(const GameSpec& spec, std::vector<MechanismZ> init,
                                      const DynamicsOptions& options) {
  if (init.size() != static_cast<std::size_t>(spec.teams)) {
    throw std::invalid_argument("initial profile needs one mechanism per team");
  }
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }

  DynamicsResult result;
  std::vector<MechanismZ> profile = std::move(init);

  std::map<std::vector<long long>, std::size_t> seen;
  std::vector<std::vector<MechanismZ>> snapshots;
  std::vector<int> movers;
  std::vector<std::vector<double>> step_values;

  const bool alternating = options.schedule == Schedule::alternating;
  // a revisit only counts as a cycle when the step that produced the state
  // moved more than the rounding grid can resolve; otherwise a slowly
  // converging sequence would alias to a repeated key
  const double arm_threshold = 10.0 * options.cycle_rounding;
  auto record_state = [&](int next_mover, double step_move) -> std::optional<std::size_t> {
    if (step_move >= arm_threshold) {
      auto key = profile_key(profile, alternating ? next_mover : -1, options.cycle_rounding);
      auto [it, inserted] = seen.emplace(std::move(key), snapshots.size());
      if (!inserted) return it->second;
    }
    snapshots.push_back(profile);
    return std::nullopt;
  };
  auto max_step = [](const MechanismZ& before, const MechanismZ& after) {
    double out = 0.0;
    for (std::size_t k = 0; k < before.z.size(); ++k) {
      out = std::max(out, std::fabs(before.z[k] - after.z[k]));
    }
    return out;
  };

  record_state(0, std::numeric_limits<double>::infinity());
  for (int round = 1; round <= options.max_rounds; ++round) {
    const std::vector<MechanismZ> round_start = profile;
    std::optional<std::size_t> repeat;
    double last_move = 0.0;
    if (alternating) {
      for (int j = 0; j < spec.teams && !repeat; ++j) {
        BestResponse br = best_response(spec, profile, j);
        const MechanismZ before = profile[j];
        damped_update(profile[j], br.mechanism, options.damping);
        last_move = max_step(before, profile[j]);
        movers.push_back(j);
        step_values.push_back({br.value});
        if (j + 1 < spec.teams) {
          repeat = record_state(j + 1, last_move);
        }
      }
    } else {
      std::vector<BestResponse> brs;
      brs.reserve(spec.teams);
      std::vector<double> values;
      for (int j = 0; j < spec.teams; ++j) {
        brs.push_back(best_response(spec, profile, j));
        values.push_back(brs.back().value);
      }
      last_move = 0.0;
      for (int j = 0; j < spec.teams; ++j) {
        const MechanismZ before = profile[j];
        damped_update(profile[j], brs[j].mechanism, options.damping);
        last_move = std::max(last_move, max_step(before, profile[j]));
      }
      movers.push_back(-1);
      step_values.push_back(std::move(values));
    }

    if (!repeat && profile_distance(profile, round_start) < options.tol) {
      BnpeCheck check = verify_bnpe(spec, profile, options.verify_tol);
      result.report = make_report(spec, std::move(profile),
                                  check.pass() ? EquilibriumReport::Status::verified_bnpe
                                               : EquilibriumReport::Status::not_equilibrium,
                                  round);
      return result;
    }
    if (!repeat) repeat = record_state(0, last_move);
    if (repeat) {
      CycleCertificate cycle;
      cycle.match_tol = options.cycle_rounding;
      for (std::size_t k = *repeat; k < snapshots.size(); ++k) {
        cycle.profiles.push_back(snapshots[k]);
        cycle.movers.push_back(movers[k]);
        cycle.step_values.push_back(step_values[k]);
      }
      cycle.period = static_cast<int>(cycle.profiles.size());
      result.cycle = std::move(cycle);
      return result;
    }
  }
  result.report = make_report(spec, std::move(profile),
                              EquilibriumReport::Status::budget_exhausted, options.max_rounds);
  return result;
}

}  // namespace teamgame
