#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <tuple>
#include <vector>

#include "age/error.hpp"
#include "age/rng.hpp"

namespace age {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0);

  /// Build from nested braces, e.g. DenseMatrix::of({{1, 2}, {3, 4}}).
  static DenseMatrix of(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j) { return v_[index(i, j)]; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }

  double* row(int i) { return v_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return v_.data() + static_cast<std::size_t>(i) * cols_;
  }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  void fill(double x);
  bool all_finite() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

/// CSR sparse matrix. Column indices are strictly increasing within each row.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_offsets;  // length rows + 1, row_offsets[0] == 0
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_indices.size()); }

  /// Build from (row, col, value) triplets; duplicate coordinates are summed.
  static SparseMatrix from_triplets(
      int rows, int cols, std::vector<std::tuple<int, int, double>> triplets);

  static SparseMatrix identity(int n);

  /// Stored value at (i, j), zero if absent.
  double at(int i, int j) const;

  /// Throws if the CSR invariants are violated.
  void check() const;

  bool operator==(const SparseMatrix&) const = default;
};

/// result[i][j] = sum_k s[i][k] * d[k][j].
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d);

/// Row-wise softmax with max-subtraction; each output row sums to 1.
DenseMatrix softmax_rows(const DenseMatrix& m);

/// Dense product a * b.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Dense product a^T * b without materializing the transpose.
DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b);

/// Dense product a * b^T without materializing the transpose.
DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b);

/// Entries uniform on [-s, s], s = sqrt(6 / (fan_in + fan_out)), drawn in
/// row-major order.
DenseMatrix glorot_init(SeededRng& rng, int fan_in, int fan_out);

}  // namespace age
