#include "age/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace age {

Graph Graph::from_edges(int n_nodes, std::span<const std::pair<int, int>> edges,
                        EdgeStats* stats) {
  EdgeStats local;
  std::vector<std::pair<int, int>> undirected;
  undirected.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n_nodes || v < 0 || v >= n_nodes) {
      throw ValidationError("edge (" + std::to_string(u) + "," +
                            std::to_string(v) + ") references a node outside [0," +
                            std::to_string(n_nodes) + ")");
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    undirected.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(undirected.begin(), undirected.end());
  auto last = std::unique(undirected.begin(), undirected.end());
  local.duplicates_collapsed = static_cast<int>(undirected.end() - last);
  undirected.erase(last, undirected.end());

  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(undirected.size() * 2);
  for (auto [u, v] : undirected) {
    triplets.emplace_back(u, v, 1.0);
    triplets.emplace_back(v, u, 1.0);
  }
  Graph g;
  g.n_nodes = n_nodes;
  g.adjacency = SparseMatrix::from_triplets(n_nodes, n_nodes, std::move(triplets));
  if (stats) *stats = local;
  return g;
}

void Graph::check() const {
  adjacency.check();
  if (adjacency.rows != n_nodes || adjacency.cols != n_nodes) {
    throw ValidationError("graph adjacency shape does not match node count");
  }
  for (int i = 0; i < n_nodes; ++i) {
    for (int p = adjacency.row_offsets[i]; p < adjacency.row_offsets[i + 1]; ++p) {
      const int j = adjacency.col_indices[p];
      if (i == j) throw ValidationError("graph adjacency has a self-loop");
      if (adjacency.values[p] != 1.0) {
        throw ValidationError("graph adjacency is not binary");
      }
      if (adjacency.at(j, i) != 1.0) {
        throw ValidationError("graph adjacency is not symmetric");
      }
    }
  }
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const int n = g.n_nodes;
  // Degrees of A + I; isolated nodes keep d~ = 1 from their self-loop.
  std::vector<double> inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i)) + 1.0);
  }

  SparseMatrix a_hat;
  a_hat.rows = a_hat.cols = n;
  a_hat.row_offsets.assign(n + 1, 0);
  a_hat.col_indices.reserve(g.adjacency.nnz() + n);
  a_hat.values.reserve(g.adjacency.nnz() + n);
  for (int i = 0; i < n; ++i) {
    int p = g.adjacency.row_offsets[i];
    const int end = g.adjacency.row_offsets[i + 1];
    bool diag_done = false;
    auto push = [&](int j, double v) {
      a_hat.col_indices.push_back(j);
      a_hat.values.push_back(v);
    };
    for (; p < end; ++p) {
      const int j = g.adjacency.col_indices[p];
      if (!diag_done && j > i) {
        push(i, inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        diag_done = true;
      }
      push(j, inv_sqrt_deg[i] * inv_sqrt_deg[j]);
    }
    if (!diag_done) push(i, inv_sqrt_deg[i] * inv_sqrt_deg[i]);
    a_hat.row_offsets[i + 1] = static_cast<int>(a_hat.col_indices.size());
  }
  return NormalizedAdjacency{std::move(a_hat)};
}

}  // namespace age
