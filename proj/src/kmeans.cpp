#include "age/kmeans.hpp"

#include <cmath>
#include <limits>

namespace age {

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

// k-means++: first centroid uniform, the rest D^2-sampled against the
// nearest centroid chosen so far. Falls back to a uniform draw when all
// remaining distances are zero.
DenseMatrix seed_centroids(const DenseMatrix& points, int k, SeededRng& rng) {
  const int n = points.rows();
  const int dim = points.cols();
  DenseMatrix centroids(k, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  int first = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
  for (int j = 0; j < dim; ++j) centroids(0, j) = points(first, j);

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(points.row(i), centroids.row(c - 1), dim));
      total += d2[i];
    }
    int pick;
    if (total == 0.0) {
      pick = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
    } else {
      const double r = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
    }
    for (int j = 0; j < dim; ++j) centroids(c, j) = points(pick, j);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& points, int k, SeededRng& rng,
                    int max_iter, double tol) {
  const int n = points.rows();
  const int dim = points.cols();
  if (k < 1) throw UsageError("kmeans: k must be >= 1");
  if (k > n) {
    throw UsageError("kmeans: k (" + std::to_string(k) + ") exceeds point count (" +
                     std::to_string(n) + ")");
  }

  KMeansResult res;
  res.centroids = seed_centroids(points, k, rng);
  res.assignments.assign(n, 0);
  std::vector<double> best_d2(n, 0.0);
  std::vector<int> counts(k, 0);
  DenseMatrix sums(k, dim);

  for (int it = 0; it < max_iter; ++it) {
    // Assignment step; ties go to the lowest centroid index.
    double objective = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(points.row(i), res.centroids.row(0), dim);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points.row(i), res.centroids.row(c), dim);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      res.assignments[i] = best;
      best_d2[i] = bd;
      objective += bd;
    }
    res.objective_curve.push_back(objective);
    res.iterations = it + 1;

    sums.fill(0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = res.assignments[i];
      ++counts[c];
      const double* p = points.row(i);
      double* s = sums.row(c);
      for (int j = 0; j < dim; ++j) s[j] += p[j];
    }

    double max_shift2 = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double shift2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double nc = sums(c, j) / counts[c];
        const double d = nc - res.centroids(c, j);
        shift2 += d * d;
        res.centroids(c, j) = nc;
      }
      max_shift2 = std::max(max_shift2, shift2);
    }

    // Reseed empty clusters to the point currently farthest from its
    // centroid; each reseeded point is taken out of contention so two empty
    // clusters never land on the same point.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; ++i) {
        if (best_d2[i] > fd) {
          fd = best_d2[i];
          far = i;
        }
      }
      for (int j = 0; j < dim; ++j) res.centroids(c, j) = points(far, j);
      counts[c] = 1;
      best_d2[far] = -1.0;
      max_shift2 = std::numeric_limits<double>::infinity();
    }

    if (max_shift2 < tol * tol) break;
  }

  // Final assignment, then one mean update so every non-empty centroid is
  // exactly the mean of its assigned points.
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = sq_dist(points.row(i), res.centroids.row(0), dim);
    for (int c = 1; c < k; ++c) {
      const double d = sq_dist(points.row(i), res.centroids.row(c), dim);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    res.assignments[i] = best;
  }
  sums.fill(0.0);
  std::fill(counts.begin(), counts.end(), 0);
  for (int i = 0; i < n; ++i) {
    const int c = res.assignments[i];
    ++counts[c];
    const double* p = points.row(i);
    double* s = sums.row(c);
    for (int j = 0; j < dim; ++j) s[j] += p[j];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (int j = 0; j < dim; ++j) res.centroids(c, j) = sums(c, j) / counts[c];
  }
  return res;
}

}  // namespace age
