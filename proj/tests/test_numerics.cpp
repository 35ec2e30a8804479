#include <doctest.h>

#include <cmath>
#include <set>

#include "age/kmeans.hpp"
#include "age/matrix.hpp"
#include "age/rng.hpp"
#include "test_support.hpp"

using namespace age;
namespace ts = age::testing;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("rng reproducibility and streams") {
  SeededRng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  SeededRng c(42, 4);
  bool differs = false;
  SeededRng a2(42, 3);
  for (int i = 0; i < 32 && !differs; ++i) differs = a2.next_u32() != c.next_u32();
  CHECK(differs);

  CHECK(SeededRng(7, 2).substream(5).stream_id() ==
        2 * SeededRng::kStreamFanout + 5);
}

TEST_CASE("rng doubles are in [0,1) and next_below is in range") {
  SeededRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.next_below(17) < 17u);
  }
  CHECK_THROWS_AS(rng.next_below(0), UsageError);
}

TEST_CASE("spmm identity is the identity map") {
  SeededRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(6));
    const int m = 1 + static_cast<int>(rng.next_below(5));
    DenseMatrix d(n, m);
    for (double& x : d.values()) x = rng.next_double() * 4 - 2;
    CHECK(spmm(SparseMatrix::identity(n), d) == d);
  }
}

TEST_CASE("spmm zero matrix gives zeros") {
  SparseMatrix zero;
  zero.rows = zero.cols = 3;
  zero.row_offsets = {0, 0, 0, 0};
  DenseMatrix d = DenseMatrix::of({{1, 2}, {3, 4}, {5, 6}});
  CHECK(spmm(zero, d) == DenseMatrix(3, 2));
}

TEST_CASE("spmm matches the dense brute-force product") {
  SeededRng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (rng.next_double() < 0.4) {
          trip.emplace_back(i, j, rng.next_double() * 2 - 1);
        }
      }
    }
    SparseMatrix s = SparseMatrix::from_triplets(4, 4, trip);
    s.check();
    DenseMatrix d(4, 3);
    for (double& x : d.values()) x = rng.next_double() * 2 - 1;

    const DenseMatrix got = spmm(s, d);
    const DenseMatrix want = ts::dense_matmul_oracle(ts::sparse_to_dense(s), d);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(got(i, j) == doctest::Approx(want(i, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("spmm shape error names both shapes") {
  DenseMatrix d(3, 2);
  CHECK_THROWS_WITH_AS(spmm(SparseMatrix::identity(2), d), "spmm: 2x2 * 3x2",
                       ShapeError);
}

TEST_CASE("softmax of zeros is uniform") {
  DenseMatrix z(2, 4);
  const DenseMatrix s = softmax_rows(z);
  for (int j = 0; j < 4; ++j) CHECK(s(0, j) == doctest::Approx(0.25));
}

TEST_CASE("softmax survives large logits") {
  const DenseMatrix s = softmax_rows(DenseMatrix::of({{1000.0, 0.0}}));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));
  CHECK(s.all_finite());
}

TEST_CASE("softmax matches extended-precision evaluation") {
  const DenseMatrix s = softmax_rows(DenseMatrix::of({{1.0, 2.0, 3.0}}));
  long double e1 = expl(1.0L), e2 = expl(2.0L), e3 = expl(3.0L);
  long double sum = e1 + e2 + e3;
  CHECK(s(0, 0) == doctest::Approx(static_cast<double>(e1 / sum)).epsilon(1e-14));
  CHECK(s(0, 1) == doctest::Approx(static_cast<double>(e2 / sum)).epsilon(1e-14));
  CHECK(s(0, 2) == doctest::Approx(static_cast<double>(e3 / sum)).epsilon(1e-14));
}

TEST_CASE("softmax rows sum to one and shift-invariance holds") {
  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int c = 2 + static_cast<int>(rng.next_below(6));
    DenseMatrix m(3, c);
    for (double& x : m.values()) x = rng.next_double() * 20 - 10;
    const DenseMatrix s = softmax_rows(m);
    DenseMatrix shifted = m;
    for (int i = 0; i < 3; ++i) {
      const double k = rng.next_double() * 100 - 50;
      for (int j = 0; j < c; ++j) shifted(i, j) += k;
    }
    const DenseMatrix s2 = softmax_rows(shifted);
    for (int i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (int j = 0; j < c; ++j) {
        sum += s(i, j);
        CHECK(std::abs(s(i, j) - s2(i, j)) < 1e-9);
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("beta(1,n) sampling statistics") {
  for (double n : {1.0, 4.0, 9.0, 16.0}) {
    SeededRng rng(static_cast<std::uint64_t>(n));
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double x = sample_beta_1_n(rng, n);
      REQUIRE(x > 0.0);
      REQUIRE(x < 1.0);
      sum += x;
    }
    const double mean = sum / draws;
    const double want = 1.0 / (1.0 + n);
    const double se = std::sqrt(n / ((1 + n) * (1 + n) * (2 + n)) / draws);
    CHECK(std::abs(mean - want) < 3 * se);
  }
  SeededRng rng(5);
  CHECK_THROWS_AS(sample_beta_1_n(rng, 0.0), UsageError);
  CHECK_THROWS_AS(sample_beta_1_n(rng, -1.0), UsageError);
}

TEST_CASE("beta sampling is deterministic for a fixed state") {
  SeededRng a(9, 1), b(9, 1);
  CHECK(sample_beta_1_n(a, 3.0) == sample_beta_1_n(b, 3.0));
}

TEST_CASE("kmeans separates two well-separated pairs") {
  const DenseMatrix pts =
      DenseMatrix::of({{0.0, 0.0}, {0.1, 0.0}, {10.0, 0.0}, {10.1, 0.0}});
  SeededRng rng(3);
  const KMeansResult km = kmeans(pts, 2, rng);
  CHECK(km.assignments[0] == km.assignments[1]);
  CHECK(km.assignments[2] == km.assignments[3]);
  CHECK(km.assignments[0] != km.assignments[2]);
  // The exhaustive 2-partition optimum puts centroids at the pair means.
  std::set<double> xs{km.centroids(0, 0), km.centroids(1, 0)};
  CHECK(*xs.begin() == doctest::Approx(0.05));
  CHECK(*xs.rbegin() == doctest::Approx(10.05));
}

TEST_CASE("kmeans with k=1 returns the coordinate-wise mean") {
  SeededRng rng(4);
  DenseMatrix pts(7, 3);
  for (double& x : pts.values()) x = rng.next_double() * 6 - 3;
  const KMeansResult km = kmeans(pts, 1, rng);
  for (int j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (int i = 0; i < 7; ++i) mean += pts(i, j);
    mean /= 7;
    CHECK(km.centroids(0, j) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("kmeans on identical points has zero within-cluster distance") {
  DenseMatrix pts(6, 2, 1.5);
  SeededRng rng(5);
  const KMeansResult km = kmeans(pts, 3, rng);
  for (int i = 0; i < 6; ++i) {
    const int c = km.assignments[i];
    for (int j = 0; j < 2; ++j) {
      CHECK(km.centroids(c, j) == doctest::Approx(pts(i, j)));
    }
  }
}

TEST_CASE("kmeans objective is non-increasing across iterations") {
  SeededRng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 12 + static_cast<int>(rng.next_below(20));
    DenseMatrix pts(n, 2);
    for (double& x : pts.values()) x = rng.next_double() * 10;
    SeededRng krng(trial);
    const KMeansResult km = kmeans(pts, 3, krng);
    for (std::size_t i = 1; i < km.objective_curve.size(); ++i) {
      CHECK(km.objective_curve[i] <= km.objective_curve[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("kmeans rejects k larger than the point count") {
  SeededRng rng(1);
  CHECK_THROWS_AS(kmeans(DenseMatrix(2, 2), 3, rng), UsageError);
}

TEST_CASE("glorot bounds, determinism, and mean") {
  SeededRng a(10), b(10);
  const DenseMatrix w1 = glorot_init(a, 3, 3);
  const DenseMatrix w2 = glorot_init(b, 3, 3);
  CHECK(w1 == w2);
  for (double x : w1.values()) {
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
  }

  SeededRng c(77);
  const DenseMatrix big = glorot_init(c, 100, 100);
  double mean = 0.0;
  for (double x : big.values()) mean += x;
  mean /= big.size();
  CHECK(std::abs(mean) < 0.02);

  CHECK_THROWS_AS(glorot_init(c, 0, 4), UsageError);
}

TEST_CASE("from_triplets sums duplicates and validates coordinates") {
  SparseMatrix s = SparseMatrix::from_triplets(2, 2, {{0, 1, 2.0}, {0, 1, 3.0}});
  CHECK(s.nnz() == 1);
  CHECK(s.at(0, 1) == 5.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), ShapeError);
}

TEST_SUITE_END();
