#include "age/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stack>

namespace age {

const char* to_string(CentralityMetric m) {
  switch (m) {
    case CentralityMetric::pagerank: return "pagerank";
    case CentralityMetric::degree: return "degree";
    case CentralityMetric::closeness: return "closeness";
    case CentralityMetric::betweenness: return "betweenness";
    case CentralityMetric::harmonic: return "harmonic";
  }
  return "?";
}

CentralityMetric parse_centrality_metric(const std::string& name) {
  if (name == "pagerank") return CentralityMetric::pagerank;
  if (name == "degree") return CentralityMetric::degree;
  if (name == "closeness") return CentralityMetric::closeness;
  if (name == "betweenness") return CentralityMetric::betweenness;
  if (name == "harmonic") return CentralityMetric::harmonic;
  throw ConfigError("unknown centrality metric \"" + name + "\"");
}

CentralityScores pagerank(const Graph& g, double rho, double tol, int max_iter) {
  if (!(rho > 0.0 && rho < 1.0)) throw UsageError("pagerank: rho must be in (0,1)");
  const int n = g.n_nodes;
  if (n < 1) throw UsageError("pagerank: empty graph");

  CentralityScores out;
  out.metric = CentralityMetric::pagerank;
  out.damping = rho;
  std::vector<double> phi(n, 1.0 / n), next(n);

  for (int it = 0; it < max_iter; ++it) {
    double dangling = 0.0;
    for (int j = 0; j < n; ++j) {
      if (g.degree(j) == 0) dangling += phi[j];
    }
    const double base = (1.0 - rho) / n + rho * dangling / n;
    std::fill(next.begin(), next.end(), base);
    for (int j = 0; j < n; ++j) {
      const int deg = g.degree(j);
      if (deg == 0) continue;
      const double share = rho * phi[j] / deg;
      for (int nb : g.neighbors(j)) next[nb] += share;
    }
    double change = 0.0;
    for (int i = 0; i < n; ++i) change += std::abs(next[i] - phi[i]);
    phi.swap(next);
    if (change < tol) {
      out.scores = std::move(phi);
      return out;
    }
  }
  out.converged = false;
  out.scores = std::move(phi);
  return out;
}

CentralityScores degree_centrality(const Graph& g) {
  CentralityScores out;
  out.metric = CentralityMetric::degree;
  out.scores.resize(g.n_nodes);
  const double denom = g.n_nodes > 1 ? g.n_nodes - 1.0 : 1.0;
  for (int v = 0; v < g.n_nodes; ++v) {
    out.scores[v] = g.n_nodes > 1 ? g.degree(v) / denom : 0.0;
  }
  return out;
}

namespace {

/// BFS distances from s; unreachable = -1.
void bfs_distances(const Graph& g, int s, std::vector<int>& dist) {
  dist.assign(g.n_nodes, -1);
  dist[s] = 0;
  std::queue<int> q;
  q.push(s);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
}

}  // namespace

CentralityScores closeness_centrality(const Graph& g) {
  CentralityScores out;
  out.metric = CentralityMetric::closeness;
  out.scores.assign(g.n_nodes, 0.0);
  if (g.n_nodes <= 1) return out;
  std::vector<int> dist;
  for (int v = 0; v < g.n_nodes; ++v) {
    bfs_distances(g, v, dist);
    long long total = 0;
    int reachable = 0;
    for (int u = 0; u < g.n_nodes; ++u) {
      if (u != v && dist[u] > 0) {
        total += dist[u];
        ++reachable;
      }
    }
    if (total > 0) {
      out.scores[v] = (static_cast<double>(reachable) / (g.n_nodes - 1)) *
                      (static_cast<double>(reachable) / total);
    }
  }
  return out;
}

CentralityScores betweenness_centrality(const Graph& g) {
  const int n = g.n_nodes;
  CentralityScores out;
  out.metric = CentralityMetric::betweenness;
  out.scores.assign(n, 0.0);
  if (n < 3) return out;

  std::vector<int> dist(n), order;
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<int>> preds(n);
  order.reserve(n);

  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      order.push_back(v);
      for (int w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int v : preds[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) out.scores[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  const double scale = 1.0 / ((n - 1.0) * (n - 2.0));
  for (double& s : out.scores) s *= scale;
  return out;
}

CentralityScores harmonic_centrality(const Graph& g) {
  CentralityScores out;
  out.metric = CentralityMetric::harmonic;
  out.scores.assign(g.n_nodes, 0.0);
  if (g.n_nodes <= 1) return out;
  std::vector<int> dist;
  for (int v = 0; v < g.n_nodes; ++v) {
    bfs_distances(g, v, dist);
    double sum = 0.0;
    for (int u = 0; u < g.n_nodes; ++u) {
      if (u != v && dist[u] > 0) sum += 1.0 / dist[u];
    }
    out.scores[v] = sum / (g.n_nodes - 1);
  }
  return out;
}

CentralityScores compute_centrality(const Graph& g, CentralityMetric metric) {
  switch (metric) {
    case CentralityMetric::pagerank: return pagerank(g);
    case CentralityMetric::degree: return degree_centrality(g);
    case CentralityMetric::closeness: return closeness_centrality(g);
    case CentralityMetric::betweenness: return betweenness_centrality(g);
    case CentralityMetric::harmonic: return harmonic_centrality(g);
  }
  throw ConfigError("unknown centrality metric");
}

}  // namespace age
