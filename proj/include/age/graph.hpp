#pragma once

#include <span>
#include <utility>
#include <vector>

#include "age/matrix.hpp"

namespace age {

struct EdgeStats {
  int self_loops_dropped = 0;
  int duplicates_collapsed = 0;
};

/// Undirected unweighted graph. The adjacency is stored CSR with both
/// directions present, binary values, and an empty diagonal.
struct Graph {
  int n_nodes = 0;
  SparseMatrix adjacency;

  /// Symmetrizes, deduplicates, and drops self-loops; counts go to `stats`.
  static Graph from_edges(int n_nodes,
                          std::span<const std::pair<int, int>> edges,
                          EdgeStats* stats = nullptr);

  int degree(int v) const {
    return adjacency.row_offsets[v + 1] - adjacency.row_offsets[v];
  }
  std::span<const int> neighbors(int v) const {
    return {adjacency.col_indices.data() + adjacency.row_offsets[v],
            adjacency.col_indices.data() + adjacency.row_offsets[v + 1]};
  }
  /// Number of undirected edges (half the stored entries).
  int n_edges() const { return adjacency.nnz() / 2; }

  void check() const;
};

/// A_hat = D~^(-1/2) (A + I) D~^(-1/2) with D~ the degree matrix of A + I.
struct NormalizedAdjacency {
  SparseMatrix matrix;
};

NormalizedAdjacency normalize_adjacency(const Graph& g);

}  // namespace age
