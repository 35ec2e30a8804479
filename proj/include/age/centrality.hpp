#pragma once

#include <string>
#include <vector>

#include "age/graph.hpp"

namespace age {

enum class CentralityMetric { pagerank, degree, closeness, betweenness, harmonic };

const char* to_string(CentralityMetric m);
CentralityMetric parse_centrality_metric(const std::string& name);

struct CentralityScores {
  CentralityMetric metric = CentralityMetric::pagerank;
  std::vector<double> scores;  // one per node
  double damping = 0.85;       // pagerank only
  bool converged = true;       // pagerank power iteration reached tol
};

/// Power iteration for the fixed point of
///   phi(i) = rho * sum_j A_ij * phi(j) / deg(j) + (1 - rho) / N
/// on the raw adjacency (no self-loops). Isolated nodes spread their mass
/// uniformly. Stops when the L1 change drops below `tol`; if max_iter is hit
/// first the last iterate is returned with converged = false.
CentralityScores pagerank(const Graph& g, double rho = 0.85, double tol = 1e-8,
                          int max_iter = 200);

/// deg(v) / (N - 1); zero for a single-node graph.
CentralityScores degree_centrality(const Graph& g);

/// Component-scaled closeness: (r/(N-1)) * (r / sum of BFS distances), with
/// r the number of nodes reachable from v (excluding v itself).
CentralityScores closeness_centrality(const Graph& g);

/// Exact betweenness via Brandes' accumulation, normalized by (N-1)(N-2)/2.
CentralityScores betweenness_centrality(const Graph& g);

/// sum_u 1/d(v,u) over reachable u != v, normalized by (N-1).
CentralityScores harmonic_centrality(const Graph& g);

CentralityScores compute_centrality(const Graph& g, CentralityMetric metric);

}  // namespace age
