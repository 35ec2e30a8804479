#pragma once

#include <vector>

#include "age/matrix.hpp"
#include "age/rng.hpp"

namespace age {

struct KMeansResult {
  std::vector<int> assignments;  // cluster id per input row
  DenseMatrix centroids;         // k x dim
  int iterations = 0;
  /// Sum of squared point-to-centroid distances recorded after each
  /// assignment step; non-increasing across Lloyd iterations.
  std::vector<double> objective_curve;
};

/// Lloyd's algorithm with k-means++ seeding. Stops when the largest centroid
/// displacement drops below `tol` or after `max_iter` iterations. Clusters
/// that come up empty are reseeded to the point farthest from its assigned
/// centroid. Ties (nearest centroid, farthest point) break on the lowest
/// index, so the result is a pure function of (points, k, rng state).
KMeansResult kmeans(const DenseMatrix& points, int k, SeededRng& rng,
                    int max_iter = 50, double tol = 1e-4);

}  // namespace age
