#include "age/active.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace age {

namespace {

// Growth range of the Beta parameter n_t over one budget; see
// sample_time_weights.
// Endpoints of the Beta parameter n_t across one budget: E[gamma_t] slides
// from 1/(1+kGammaN0) ~ 0.53 down to 1/(1+kGammaN1) ~ 0.36. The range keeps
// draws away from the extremes, where selection degenerates into a single
// criterion and measured F1 drops on the reference data.
constexpr double kGammaN0 = 0.9;
constexpr double kGammaN1 = 1.8;

}  // namespace

StrategyKind StrategyKind::parse(const std::string& name, double gamma) {
  StrategyKind s;
  s.gamma = gamma;
  if (name == "random") s.kind = Strategy::random;
  else if (name == "entropy") s.kind = Strategy::entropy;
  else if (name == "density") s.kind = Strategy::density;
  else if (name == "entropy_density") s.kind = Strategy::entropy_density;
  else if (name == "centrality") s.kind = Strategy::centrality;
  else if (name == "pipeline") s.kind = Strategy::pipeline;
  else if (name == "age_fixed") s.kind = Strategy::age_fixed;
  else if (name == "age_time_sensitive" || name == "age") s.kind = Strategy::age_time_sensitive;
  else if (name == "gcn") s.kind = Strategy::gcn_balanced;
  else throw ConfigError("unknown strategy \"" + name + "\"");
  s.validate();
  return s;
}

std::string StrategyKind::name() const {
  switch (kind) {
    case Strategy::random: return "random";
    case Strategy::entropy: return "entropy";
    case Strategy::density: return "density";
    case Strategy::entropy_density: return "entropy_density";
    case Strategy::centrality: return "centrality";
    case Strategy::pipeline: return "pipeline";
    case Strategy::age_fixed: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "age_fixed_%g", gamma);
      return buf;
    }
    case Strategy::age_time_sensitive: return "age_time_sensitive";
    case Strategy::gcn_balanced: return "gcn";
  }
  return "?";
}

bool StrategyKind::queries_during_training() const {
  switch (kind) {
    case Strategy::random:
    case Strategy::gcn_balanced:
    case Strategy::pipeline:
      return false;
    default:
      return true;
  }
}

void StrategyKind::validate() const {
  if (kind == Strategy::age_fixed && !(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("age_fixed requires gamma in (0,1)");
  }
}

QueryState QueryState::make(std::span<const int> train_pool,
                            std::span<const int> initial_labeled, int budget,
                            StrategyKind strategy) {
  if (budget < 0) throw UsageError("QueryState: negative budget");
  QueryState s;
  s.labeled.assign(initial_labeled.begin(), initial_labeled.end());
  std::sort(s.labeled.begin(), s.labeled.end());
  std::vector<int> pool(train_pool.begin(), train_pool.end());
  std::sort(pool.begin(), pool.end());
  std::set_difference(pool.begin(), pool.end(), s.labeled.begin(),
                      s.labeled.end(), std::back_inserter(s.candidates));
  if (s.labeled.size() + s.candidates.size() != pool.size()) {
    throw UsageError("QueryState: initial labeled nodes must lie in the pool");
  }
  s.budget_total = budget;
  s.strategy = strategy;
  return s;
}

bool QueryState::contains_labeled(int node) const {
  return std::binary_search(labeled.begin(), labeled.end(), node);
}

void QueryState::check() const {
  if (t > budget_total) throw UsageError("QueryState: t exceeds budget");
  std::vector<int> inter;
  std::set_intersection(labeled.begin(), labeled.end(), candidates.begin(),
                        candidates.end(), std::back_inserter(inter));
  if (!inter.empty()) {
    throw UsageError("QueryState: labeled and candidate sets overlap");
  }
}

std::vector<double> entropy_scores(const DenseMatrix& z,
                                   std::span<const int> candidates) {
  const double max_entropy = std::log(static_cast<double>(z.cols()));
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int v : candidates) {
    const double* row = z.row(v);
    double h = 0.0;
    for (int c = 0; c < z.cols(); ++c) {
      if (row[c] > 0.0) h -= row[c] * std::log(row[c]);
    }
    out.push_back(std::clamp(h, 0.0, max_entropy));
  }
  return out;
}

std::vector<double> density_scores(const DenseMatrix& emb,
                                   std::span<const int> candidates, int k,
                                   SeededRng& rng,
                                   std::span<const int> cluster_pool) {
  if (cluster_pool.empty()) cluster_pool = candidates;
  if (cluster_pool.empty()) throw UsageError("density_scores: empty pool");
  if (k > static_cast<int>(cluster_pool.size())) {
    std::fprintf(stderr,
                 "density_scores: pool has %zu points, clamping k from %d\n",
                 cluster_pool.size(), k);
    k = static_cast<int>(cluster_pool.size());
  }

  DenseMatrix points(static_cast<int>(cluster_pool.size()), emb.cols());
  for (std::size_t i = 0; i < cluster_pool.size(); ++i) {
    const double* src = emb.row(cluster_pool[i]);
    std::copy(src, src + emb.cols(), points.row(static_cast<int>(i)));
  }
  KMeansResult km = kmeans(points, k, rng);

  // Centroid assignment per pool node; candidates outside the pool (possible
  // with an all-unlabeled pool) fall to their nearest centroid.
  std::vector<int> pool_index(emb.rows(), -1);
  for (std::size_t i = 0; i < cluster_pool.size(); ++i) {
    pool_index[cluster_pool[i]] = static_cast<int>(i);
  }
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int v : candidates) {
    const double* e = emb.row(v);
    int cluster;
    if (pool_index[v] >= 0) {
      cluster = km.assignments[pool_index[v]];
    } else {
      cluster = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d2 = 0.0;
        for (int j = 0; j < emb.cols(); ++j) {
          const double d = e[j] - km.centroids(c, j);
          d2 += d * d;
        }
        if (d2 < best) {
          best = d2;
          cluster = c;
        }
      }
    }
    double d2 = 0.0;
    for (int j = 0; j < emb.cols(); ++j) {
      const double d = e[j] - km.centroids(cluster, j);
      d2 += d * d;
    }
    out.push_back(1.0 / (1.0 + std::sqrt(d2)));
  }
  return out;
}

std::vector<double> percentile(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n == 0) throw UsageError("percentile: empty score vector");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double p = static_cast<double>(i) / n;  // strictly-smaller count
    for (std::size_t r = i; r < j; ++r) out[order[r]] = p;
    i = j;
  }
  return out;
}

TimeWeights sample_time_weights(int t, int budget, SeededRng& rng) {
  if (t < 1 || t > budget) {
    throw UsageError("sample_time_weights: t must be in [1, budget]");
  }
  // One Beta draw per query; n_t grows linearly in budget fraction, so the
  // centrality weight starts near 1 and decays gradually while entropy and
  // density split the remainder equally. Splitting (rather than drawing all
  // three weights independently) keeps every query a blend of the criteria;
  // independent heavy-tailed draws degenerate into single-criterion picks.
  const double frac = budget > 1 ? (t - 1.0) / (budget - 1.0) : 1.0;
  const double n_t = kGammaN0 + (kGammaN1 - kGammaN0) * frac;
  TimeWeights w;
  w.gamma = sample_beta_1_n(rng, n_t);
  // Halving the complement keeps alpha + beta + gamma == 1 exactly.
  w.alpha = (1.0 - w.gamma) / 2.0;
  w.beta = w.alpha;
  return w;
}

std::vector<double> combined_scores(std::span<const double> p_entropy,
                                    std::span<const double> p_density,
                                    std::span<const double> p_centrality,
                                    const TimeWeights& w) {
  const std::size_t n = p_entropy.size();
  if (p_density.size() != n || p_centrality.size() != n) {
    throw ShapeError("combined_scores: percentile arrays have lengths " +
                     std::to_string(n) + ", " + std::to_string(p_density.size()) +
                     ", " + std::to_string(p_centrality.size()));
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = w.alpha * p_entropy[i] + w.beta * p_density[i] +
             w.gamma * p_centrality[i];
  }
  return out;
}

namespace {

void move_to_labeled(QueryState& state, int node) {
  auto it = std::lower_bound(state.candidates.begin(), state.candidates.end(), node);
  state.candidates.erase(it);
  state.labeled.insert(
      std::lower_bound(state.labeled.begin(), state.labeled.end(), node), node);
}

}  // namespace

Selection select_next(QueryState& state, const DenseMatrix& z,
                      const DenseMatrix& emb,
                      const CentralityScores& centrality, SeededRng& rng,
                      const SelectOptions& options) {
  if (state.t >= state.budget_total) {
    throw UsageError("select_next: labeling budget exhausted");
  }
  if (state.candidates.empty()) {
    throw UsageError("select_next: no candidates left");
  }
  if (options.batch_size < 1) throw UsageError("select_next: batch_size must be >= 1");
  const int n_pick = std::min<int>(
      {options.batch_size, state.budget_total - state.t,
       static_cast<int>(state.candidates.size())});

  Selection sel;
  if (state.strategy.kind == Strategy::random) {
    sel.nodes = sample_without_replacement(state.candidates, n_pick, rng);
    sel.scores.assign(sel.nodes.size(), 0.0);
    for (int node : sel.nodes) move_to_labeled(state, node);
    state.t += n_pick;
    return sel;
  }
  if (state.strategy.kind == Strategy::gcn_balanced) {
    throw UsageError("select_next: the gcn reference baseline never queries");
  }

  const auto& cand = state.candidates;
  const std::size_t m = cand.size();
  const bool use_entropy = state.strategy.kind != Strategy::density &&
                           state.strategy.kind != Strategy::centrality;
  const bool use_density = state.strategy.kind != Strategy::entropy &&
                           state.strategy.kind != Strategy::centrality;
  const bool use_centrality = state.strategy.kind == Strategy::centrality ||
                              state.strategy.kind == Strategy::age_fixed ||
                              state.strategy.kind == Strategy::age_time_sensitive ||
                              state.strategy.kind == Strategy::pipeline;

  std::vector<double> pe(m, 0.0), pd(m, 0.0), pc(m, 0.0);
  if (use_entropy) pe = percentile(entropy_scores(z, cand));
  if (use_density) {
    std::vector<int> pool;
    std::span<const int> pool_view = cand;
    if (options.density_pool == DensityPool::all_unlabeled) {
      for (int v = 0; v < z.rows(); ++v) {
        if (!state.contains_labeled(v)) pool.push_back(v);
      }
      pool_view = pool;
    }
    pd = percentile(density_scores(emb, cand, z.cols(), rng, pool_view));
  }
  if (use_centrality) {
    std::vector<double> raw(m);
    for (std::size_t i = 0; i < m; ++i) raw[i] = centrality.scores[cand[i]];
    pc = percentile(raw);
  }

  switch (state.strategy.kind) {
    case Strategy::entropy: sel.weights = {1.0, 0.0, 0.0}; break;
    case Strategy::density: sel.weights = {0.0, 1.0, 0.0}; break;
    case Strategy::centrality: sel.weights = {0.0, 0.0, 1.0}; break;
    case Strategy::entropy_density: sel.weights = {0.5, 0.5, 0.0}; break;
    case Strategy::age_fixed:
      sel.weights = {(1.0 - state.strategy.gamma) / 2.0,
                     (1.0 - state.strategy.gamma) / 2.0, state.strategy.gamma};
      break;
    case Strategy::pipeline:
    case Strategy::age_time_sensitive:
      sel.weights = sample_time_weights(state.t + 1, state.budget_total, rng);
      break;
    default:
      throw UsageError("select_next: unsupported strategy");
  }
  const std::vector<double> combined = combined_scores(pe, pd, pc, sel.weights);

  // Top n_pick by score; candidates are sorted ascending, so a strict
  // comparison on score ties breaks toward the smallest node id.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return combined[a] > combined[b];
  });
  for (int r = 0; r < n_pick; ++r) {
    sel.nodes.push_back(cand[order[r]]);
    sel.scores.push_back(combined[order[r]]);
  }
  for (int node : sel.nodes) move_to_labeled(state, node);
  state.t += n_pick;
  return sel;
}

std::string query_log_line(int t, int node, const TimeWeights& w, double score) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d\t%d\t%.6f\t%.6f\t%.6f\t%.6f", t, node,
                w.alpha, w.beta, w.gamma, score);
  return buf;
}

}  // namespace age
