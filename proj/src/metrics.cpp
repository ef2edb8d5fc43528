#include "teamgame/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace teamgame {

namespace {

/// Dinic max-flow on a small dense-ish graph with double capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  void add_edge(int from, int to, double cap) {
    edges_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0.0});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  double run(int source, int sink) {
    double flow = 0.0;
    while (bfs(source, sink)) {
      it_ = head_;
      while (true) {
        const double pushed = dfs(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= kFlowEps) break;
        flow += pushed;
      }
    }
    return flow;
  }

 private:
  static constexpr double kFlowEps = 1e-15;

  struct Edge {
    int to;
    int next;
    double cap;
  };

  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> queue;
    queue.push(source);
    level_[source] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > kFlowEps && level_[edges_[e].to] == -1) {
          level_[edges_[e].to] = level_[u] + 1;
          queue.push(edges_[e].to);
        }
      }
    }
    return level_[sink] != -1;
  }

  double dfs(int u, int sink, double limit) {
    if (u == sink) return limit;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      Edge& edge = edges_[e];
      if (edge.cap > kFlowEps && level_[edge.to] == level_[u] + 1) {
        const double pushed = dfs(edge.to, sink, std::min(limit, edge.cap));
        if (pushed > kFlowEps) {
          edge.cap -= pushed;
          edges_[e ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    return 0.0;
  }

  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
  std::vector<Edge> edges_;
};

struct Support {
  std::vector<std::size_t> points;
  std::vector<double> mass;
};

Support support_of(const std::vector<double>& dist) {
  Support s;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] > 0.0) {
      s.points.push_back(k);
      s.mass.push_back(dist[k]);
    }
  }
  return s;
}

double max_transport_supports(const Support& mu, const Support& nu,
                              const std::vector<double>& pair_distance, double epsilon) {
  const int ms = static_cast<int>(mu.points.size());
  const int ns = static_cast<int>(nu.points.size());
  MaxFlow flow(ms + ns + 2);
  const int source = ms + ns;
  const int sink = ms + ns + 1;
  for (int i = 0; i < ms; ++i) flow.add_edge(source, i, mu.mass[i]);
  for (int k = 0; k < ns; ++k) flow.add_edge(ms + k, sink, nu.mass[k]);
  for (int i = 0; i < ms; ++i) {
    for (int k = 0; k < ns; ++k) {
      if (pair_distance[static_cast<std::size_t>(i) * ns + k] <= epsilon) {
        flow.add_edge(i, ms + k, 2.0);
      }
    }
  }
  return std::min(1.0, flow.run(source, sink));
}

std::vector<double> pairwise_distances(const Support& mu, const Support& nu,
                                       const GroundMetric& metric, const ProductIndex& index) {
  const std::size_t ns = nu.points.size();
  std::vector<double> out(mu.points.size() * ns);
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    for (std::size_t k = 0; k < ns; ++k) {
      out[i * ns + k] = metric.distance_flat(index, mu.points[i], nu.points[k]);
    }
  }
  return out;
}

}  // namespace

double max_transport_within(const TransportInstance& instance) {
  if (instance.metric == nullptr) throw std::invalid_argument("transport instance needs a metric");
  const ProductIndex index = instance.metric->index();
  if (instance.mu.size() != index.size() || instance.nu.size() != index.size()) {
    throw std::invalid_argument("distributions do not match the metric space");
  }
  const Support mu = support_of(instance.mu.mass);
  const Support nu = support_of(instance.nu.mass);
  const std::vector<double> dist = pairwise_distances(mu, nu, *instance.metric, index);
  return max_transport_supports(mu, nu, dist, instance.epsilon);
}

double prokhorov(const std::vector<double>& mu, const std::vector<double>& nu,
                 const GroundMetric& metric) {
  const ProductIndex index = metric.index();
  if (mu.size() != index.size() || nu.size() != index.size()) {
    throw std::invalid_argument("distributions do not match the metric space");
  }
  const Support su = support_of(mu);
  const Support sv = support_of(nu);
  const std::vector<double> dist = pairwise_distances(su, sv, metric, index);

  std::vector<double> breakpoints = dist;
  breakpoints.push_back(0.0);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  double best = 1.0;
  for (double d : breakpoints) {
    if (d >= best) break;  // candidates are at least d and only grow from here
    const double moved = max_transport_supports(su, sv, dist, d);
    double leftover = 1.0 - moved;
    if (leftover < kMassTol) leftover = 0.0;  // mass-normalization dust
    best = std::min(best, std::max(d, leftover));
  }
  return best;
}

double hausdorff(const std::vector<std::vector<double>>& set_a,
                 const std::vector<std::vector<double>>& set_b, const GroundMetric& metric) {
  if (set_a.empty() || set_b.empty()) {
    throw std::invalid_argument("hausdorff distance needs nonempty sets");
  }
  std::vector<double> pair(set_a.size() * set_b.size());
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    for (std::size_t k = 0; k < set_b.size(); ++k) {
      pair[i * set_b.size() + k] = prokhorov(set_a[i], set_b[k], metric);
    }
  }
  double forward = 0.0;
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    double nearest = pair[i * set_b.size()];
    for (std::size_t k = 1; k < set_b.size(); ++k) {
      nearest = std::min(nearest, pair[i * set_b.size() + k]);
    }
    forward = std::max(forward, nearest);
  }
  double backward = 0.0;
  for (std::size_t k = 0; k < set_b.size(); ++k) {
    double nearest = pair[k];
    for (std::size_t i = 1; i < set_a.size(); ++i) {
      nearest = std::min(nearest, pair[i * set_b.size() + k]);
    }
    backward = std::max(backward, nearest);
  }
  return std::max(forward, backward);
}

std::vector<std::vector<double>> deviation_law_set(const GameSpec& spec,
                                                   const std::vector<MechanismZ>& profile,
                                                   std::size_t generator_cap) {
  std::vector<std::vector<double>> laws;
  for (int j = 0; j < spec.teams; ++j) {
    for (int i = 0; i < spec.members; ++i) {
      for (const auto& strategy : deviation_generators(spec, profile, j, i, generator_cap)) {
        ExtendedLaw law = deviation_law(spec, profile, strategy);
        if (std::find(laws.begin(), laws.end(), law.mass) == laws.end()) {
          laws.push_back(std::move(law.mass));
        }
      }
    }
  }
  return laws;
}

RobustDistance robust_narrow_distance(const GameSpec& spec,
                                      const std::vector<MechanismZ>& profile_a,
                                      const std::vector<MechanismZ>& profile_b,
                                      std::size_t generator_cap) {
  RobustDistance out;
  const GroundMetric outcome_metric = spec.outcome_metric();
  out.truthful_prokhorov = prokhorov(truthful_law(spec, profile_a).mass,
                                     truthful_law(spec, profile_b).mass, outcome_metric);
  const GroundMetric extended_metric = spec.extended_metric();
  out.deviation_hausdorff = hausdorff(deviation_law_set(spec, profile_a, generator_cap),
                                      deviation_law_set(spec, profile_b, generator_cap),
                                      extended_metric);
  return out;
}

}  // namespace teamgame
