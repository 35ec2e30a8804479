#pragma once

#include <span>
#include <string>
#include <vector>

#include "age/centrality.hpp"
#include "age/kmeans.hpp"
#include "age/matrix.hpp"
#include "age/rng.hpp"

namespace age {

enum class Strategy {
  random,
  entropy,
  density,
  entropy_density,
  centrality,
  pipeline,
  age_fixed,
  age_time_sensitive,
  gcn_balanced,  // class-balanced (L+B)/C reference baseline, never queries
};

struct StrategyKind {
  Strategy kind = Strategy::age_time_sensitive;
  double gamma = 0.0;  // age_fixed only; alpha = beta = (1 - gamma) / 2

  static StrategyKind parse(const std::string& name, double gamma = 0.0);
  std::string name() const;
  /// True when the strategy issues one query per epoch during training.
  bool queries_during_training() const;
  void validate() const;
};

/// Per-query criterion weights; alpha + beta + gamma = 1.
struct TimeWeights {
  double alpha = 0.0;  // entropy
  double beta = 0.0;   // density
  double gamma = 0.0;  // centrality

  double sum() const { return alpha + beta + gamma; }
};

/// Labeled / candidate partition of the training pool plus query budget.
/// Both node lists stay sorted ascending.
struct QueryState {
  std::vector<int> labeled;
  std::vector<int> candidates;
  int budget_total = 0;
  int t = 0;  // queries issued so far
  StrategyKind strategy;

  static QueryState make(std::span<const int> train_pool,
                         std::span<const int> initial_labeled, int budget,
                         StrategyKind strategy);
  bool contains_labeled(int node) const;
  void check() const;
};

/// phi_entropy(v) = -sum_c z[v][c] ln z[v][c], with 0 ln 0 = 0; clamped to
/// the mathematical range [0, ln C].
std::vector<double> entropy_scores(const DenseMatrix& z,
                                   std::span<const int> candidates);

/// k-means the embeddings of `cluster_pool` (defaults to the candidates) and
/// score each candidate 1 / (1 + dist to its assigned centroid). When the
/// pool has fewer than k points, k falls back to the pool size with a warning
/// on stderr.
std::vector<double> density_scores(const DenseMatrix& emb,
                                   std::span<const int> candidates, int k,
                                   SeededRng& rng,
                                   std::span<const int> cluster_pool = {});

/// percentile[v] = |{u : score(u) < score(v)}| / |scores|; ties share a
/// value, so an all-equal vector maps to all zeros.
std::vector<double> percentile(std::span<const double> scores);

/// Draw gamma ~ Beta(1, n_t) with n_t rising linearly over the budget, so
/// the centrality weight's expectation decays (~0.53 at t=1 to ~0.36 at
/// t=B), and split the remainder equally: alpha = beta = (1 - gamma) / 2.
/// The sum is exactly 1.
TimeWeights sample_time_weights(int t, int budget, SeededRng& rng);

/// Elementwise alpha * p_entropy + beta * p_density + gamma * p_centrality.
std::vector<double> combined_scores(std::span<const double> p_entropy,
                                    std::span<const double> p_density,
                                    std::span<const double> p_centrality,
                                    const TimeWeights& w);

enum class DensityPool { candidates, all_unlabeled };

struct SelectOptions {
  int batch_size = 1;
  DensityPool density_pool = DensityPool::candidates;
};

struct Selection {
  std::vector<int> nodes;      // in pick order
  TimeWeights weights;         // weights used for this query
  std::vector<double> scores;  // combined score per picked node
};

/// Score the candidates under state.strategy and move the top batch_size of
/// them (ties to the smallest node id) from the candidate pool to the labeled
/// set, advancing t accordingly. The random strategy draws uniformly instead
/// of scoring. k for the density clustering is z.cols().
Selection select_next(QueryState& state, const DenseMatrix& z,
                      const DenseMatrix& emb,
                      const CentralityScores& centrality, SeededRng& rng,
                      const SelectOptions& options = {});

/// Audit line: "t<TAB>node<TAB>alpha<TAB>beta<TAB>gamma<TAB>score".
std::string query_log_line(int t, int node, const TimeWeights& w, double score);

}  // namespace age
