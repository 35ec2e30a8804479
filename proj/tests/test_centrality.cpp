#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "age/centrality.hpp"
#include "test_support.hpp"

using namespace age;
namespace ts = age::testing;

namespace {

/// Relabel nodes by `perm` (new id of old node i is perm[i]).
Graph permute(const Graph& g, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < g.n_nodes; ++i) {
    for (int j : g.neighbors(i)) {
      if (i < j) edges.emplace_back(perm[i], perm[j]);
    }
  }
  return Graph::from_edges(g.n_nodes, edges);
}

}  // namespace

TEST_SUITE_BEGIN("centrality");

TEST_CASE("pagerank on a cycle is uniform") {
  for (double rho : {0.5, 0.85}) {
    const CentralityScores pr = pagerank(ts::cycle_graph(5), rho);
    CHECK(pr.converged);
    for (double s : pr.scores) CHECK(s == doctest::Approx(0.2).epsilon(1e-8));
  }
}

TEST_CASE("pagerank on the 3-node path matches the dense solve") {
  const Graph g = ts::path_graph(3);
  const CentralityScores pr = pagerank(g, 0.85, 1e-12, 1000);
  const std::vector<double> want = ts::pagerank_linear_solve(g, 0.85);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(pr.scores[i] - want[i]) < 1e-10);
  }
  CHECK(pr.scores[1] > pr.scores[0]);
  CHECK(pr.scores[1] > pr.scores[2]);
}

TEST_CASE("pagerank sums to one and is bounded below") {
  SeededRng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(9));
    const Graph g = ts::random_connected_graph(n, 0.3, rng);
    const CentralityScores pr = pagerank(g);
    const double sum = std::accumulate(pr.scores.begin(), pr.scores.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-6);
    for (double s : pr.scores) CHECK(s >= (1.0 - 0.85) / n - 1e-12);
  }
}

TEST_CASE("pagerank handles isolated (dangling) nodes") {
  // One edge plus an isolated node; mass still sums to 1.
  const Graph g = Graph::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}});
  const CentralityScores pr = pagerank(g, 0.85, 1e-12, 2000);
  const std::vector<double> want = ts::pagerank_linear_solve(g, 0.85);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(pr.scores[i] - want[i]) < 1e-9);
  CHECK(std::abs(std::accumulate(pr.scores.begin(), pr.scores.end(), 0.0) - 1.0) <
        1e-9);
}

TEST_CASE("pagerank rejects bad damping and flags non-convergence") {
  const Graph g = ts::path_graph(3);
  CHECK_THROWS_AS(pagerank(g, 0.0), UsageError);
  CHECK_THROWS_AS(pagerank(g, 1.0), UsageError);
  const CentralityScores pr = pagerank(g, 0.85, 1e-30, 2);
  CHECK_FALSE(pr.converged);
  CHECK(pr.scores.size() == 3);
}

TEST_CASE("degree centrality hand values") {
  const CentralityScores star = degree_centrality(ts::star_graph(5));
  CHECK(star.scores[0] == doctest::Approx(1.0));
  CHECK(star.scores[1] == doctest::Approx(0.25));

  const Graph iso = Graph::from_edges(2, {});
  CHECK(degree_centrality(iso).scores[0] == 0.0);

  const CentralityScores path = degree_centrality(ts::path_graph(3));
  CHECK(path.scores[0] == doctest::Approx(0.5));
  CHECK(path.scores[1] == doctest::Approx(1.0));
  CHECK(path.scores[2] == doctest::Approx(0.5));
}

TEST_CASE("closeness on K4 is all ones; isolated nodes score zero") {
  for (double s : closeness_centrality(ts::complete_graph(4)).scores) {
    CHECK(s == doctest::Approx(1.0));
  }
  const Graph iso = Graph::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(closeness_centrality(iso).scores[2] == 0.0);
}

TEST_CASE("closeness on the 4-node path matches the oracle") {
  const Graph g = ts::path_graph(4);
  const CentralityScores got = closeness_centrality(g);
  const std::vector<double> want = ts::closeness_oracle(g);
  for (int i = 0; i < 4; ++i) CHECK(got.scores[i] == doctest::Approx(want[i]));
  // Endpoint: distances 1,2,3 -> 3/6 = 1/2; inner: 1,1,2 -> 3/4.
  CHECK(got.scores[0] == doctest::Approx(0.5));
  CHECK(got.scores[1] == doctest::Approx(0.75));
}

TEST_CASE("betweenness hand values") {
  const CentralityScores path = betweenness_centrality(ts::path_graph(3));
  CHECK(path.scores[1] == doctest::Approx(1.0));
  CHECK(path.scores[0] == doctest::Approx(0.0));
  for (double s : betweenness_centrality(ts::complete_graph(5)).scores) {
    CHECK(s == doctest::Approx(0.0));
  }
}

TEST_CASE("betweenness matches brute-force enumeration on random graphs") {
  SeededRng rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(6));
    const Graph g = ts::random_connected_graph(n, 0.35, rng);
    const CentralityScores got = betweenness_centrality(g);
    const std::vector<double> want = ts::betweenness_bruteforce(g);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(got.scores[i] - want[i]) < 1e-10);
    }
  }
}

TEST_CASE("harmonic hand values and oracle") {
  for (double s : harmonic_centrality(ts::complete_graph(4)).scores) {
    CHECK(s == doctest::Approx(1.0));
  }
  const CentralityScores path = harmonic_centrality(ts::path_graph(3));
  CHECK(path.scores[0] == doctest::Approx(0.75));  // (1 + 1/2) / 2

  const Graph iso = Graph::from_edges(2, {});
  CHECK(harmonic_centrality(iso).scores[0] == 0.0);

  SeededRng rng(29);
  const Graph g = ts::random_connected_graph(7, 0.3, rng);
  const std::vector<double> want = ts::harmonic_oracle(g);
  const CentralityScores got = harmonic_centrality(g);
  for (int i = 0; i < 7; ++i) CHECK(got.scores[i] == doctest::Approx(want[i]));
}

TEST_CASE("all metrics are invariant under node relabeling") {
  SeededRng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_below(5));
    const Graph g = ts::random_connected_graph(n, 0.4, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.next_below(i + 1)]);
    }
    const Graph h = permute(g, perm);
    for (auto metric :
         {CentralityMetric::pagerank, CentralityMetric::degree,
          CentralityMetric::closeness, CentralityMetric::betweenness,
          CentralityMetric::harmonic}) {
      const auto a = compute_centrality(g, metric);
      const auto b = compute_centrality(h, metric);
      for (int i = 0; i < n; ++i) {
        CHECK(a.scores[i] == doctest::Approx(b.scores[perm[i]]).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("metric names round-trip") {
  for (auto m : {CentralityMetric::pagerank, CentralityMetric::degree,
                 CentralityMetric::closeness, CentralityMetric::betweenness,
                 CentralityMetric::harmonic}) {
    CHECK(parse_centrality_metric(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_centrality_metric("eigenvector"), ConfigError);
}

TEST_SUITE_END();
