#include "age/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace age {

namespace {

std::string shape_str(int r, int c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("DenseMatrix: negative dimension");
  v_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

DenseMatrix DenseMatrix::of(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  DenseMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) {
      throw ShapeError("DenseMatrix::of: ragged rows");
    }
    int j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

void DenseMatrix::fill(double x) { std::fill(v_.begin(), v_.end(), x); }

bool DenseMatrix::all_finite() const {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

SparseMatrix SparseMatrix::from_triplets(
    int rows, int cols, std::vector<std::tuple<int, int, double>> triplets) {
  for (const auto& [r, c, v] : triplets) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ShapeError("from_triplets: coordinate (" + std::to_string(r) + "," +
                       std::to_string(c) + ") outside " + shape_str(rows, cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_offsets.assign(rows + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    auto [r, c, v] = triplets[i];
    double sum = 0.0;
    for (; i < triplets.size() && std::get<0>(triplets[i]) == r &&
           std::get<1>(triplets[i]) == c;
         ++i) {
      sum += std::get<2>(triplets[i]);
    }
    m.col_indices.push_back(c);
    m.values.push_back(sum);
    ++m.row_offsets[r + 1];
  }
  for (int r = 0; r < rows; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m;
  m.rows = m.cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.resize(n);
  m.values.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) m.row_offsets[i] = i;
  for (int i = 0; i < n; ++i) m.col_indices[i] = i;
  return m;
}

double SparseMatrix::at(int i, int j) const {
  for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
    if (col_indices[p] == j) return values[p];
    if (col_indices[p] > j) break;
  }
  return 0.0;
}

void SparseMatrix::check() const {
  if (static_cast<int>(row_offsets.size()) != rows + 1 ||
      row_offsets.front() != 0 || row_offsets.back() != nnz()) {
    throw ShapeError("SparseMatrix: bad row_offsets");
  }
  if (values.size() != col_indices.size()) {
    throw ShapeError("SparseMatrix: values/col_indices length mismatch");
  }
  for (int r = 0; r < rows; ++r) {
    if (row_offsets[r] > row_offsets[r + 1]) {
      throw ShapeError("SparseMatrix: row_offsets not monotone");
    }
    for (int p = row_offsets[r]; p < row_offsets[r + 1]; ++p) {
      if (col_indices[p] < 0 || col_indices[p] >= cols) {
        throw ShapeError("SparseMatrix: column index out of range");
      }
      if (p > row_offsets[r] && col_indices[p] <= col_indices[p - 1]) {
        throw ShapeError("SparseMatrix: columns not strictly increasing");
      }
    }
  }
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols != d.rows()) {
    throw ShapeError("spmm: " + shape_str(s.rows, s.cols) + " * " +
                     shape_str(d.rows(), d.cols()));
  }
  DenseMatrix out(s.rows, d.cols());
  const int c = d.cols();
  for (int i = 0; i < s.rows; ++i) {
    double* oi = out.row(i);
    for (int p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p) {
      const double sv = s.values[p];
      const double* dk = d.row(s.col_indices[p]);
      for (int j = 0; j < c; ++j) oi[j] += sv * dk[j];
    }
  }
  return out;
}

DenseMatrix softmax_rows(const DenseMatrix& m) {
  if (m.cols() < 1) throw ShapeError("softmax_rows: need at least one column");
  DenseMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    const double* x = m.row(i);
    double* y = out.row(i);
    double mx = x[0];
    for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, x[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      y[j] = std::exp(x[j] - mx);
      sum += y[j];
    }
    for (int j = 0; j < m.cols(); ++j) y[j] /= sum;
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a.rows(), a.cols()) + " * " +
                     shape_str(b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  const int n = b.cols();
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double av = ai[k];
      if (av == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < n; ++j) oi[j] += av * bk[j];
    }
  }
  return out;
}

DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_transpose_a: " + shape_str(a.cols(), a.rows()) +
                     " * " + shape_str(b.rows(), b.cols()));
  }
  DenseMatrix out(a.cols(), b.cols());
  const int n = b.cols();
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double av = ai[k];
      if (av == 0.0) continue;
      double* ok = out.row(k);
      for (int j = 0; j < n; ++j) ok[j] += av * bi[j];
    }
  }
  return out;
}

DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transpose_b: " + shape_str(a.rows(), a.cols()) +
                     " * " + shape_str(b.cols(), b.rows()));
  }
  DenseMatrix out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (int k = 0; k < b.rows(); ++k) {
      const double* bk = b.row(k);
      double s = 0.0;
      for (int j = 0; j < a.cols(); ++j) s += ai[j] * bk[j];
      oi[k] = s;
    }
  }
  return out;
}

DenseMatrix glorot_init(SeededRng& rng, int fan_in, int fan_out) {
  if (fan_in < 1 || fan_out < 1) {
    throw UsageError("glorot_init: fan_in and fan_out must be >= 1");
  }
  const double s = std::sqrt(6.0 / (fan_in + fan_out));
  DenseMatrix m(fan_in, fan_out);
  for (double& x : m.values()) x = (2.0 * rng.next_double() - 1.0) * s;
  return m;
}

}  // namespace age
