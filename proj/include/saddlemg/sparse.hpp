#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace saddlemg {

using Vector = std::vector<double>;

/// One (row, col, value) entry used to build a CsrMatrix.
struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with strictly increasing column indices per
/// row and no stored exact zeros.
class CsrMatrix {
public:
  CsrMatrix() = default;
  /// Zero matrix of the given shape.
  CsrMatrix(int rows, int cols);
  /// Takes ownership of raw CSR arrays. Validates ordering and drops exact zeros.
  CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
            std::vector<double> values);

  static CsrMatrix identity(int n);
  static CsrMatrix diagonal(std::span<const double> d);
  /// Duplicate entries are summed in insertion order, so the result is
  /// bitwise reproducible for a fixed triplet sequence.
  static CsrMatrix from_triplets(int rows, int cols, std::span<const Triplet> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const int> row_cols(int i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_values(int i) const {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;
  Vector diagonal_values() const;
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const CsrMatrix& m, std::span<const double> x);
/// y = alpha * M x + beta * y
void spmv_into(const CsrMatrix& m, std::span<const double> x, std::span<double> y,
               double alpha = 1.0, double beta = 0.0);

CsrMatrix transpose(const CsrMatrix& m);
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);
/// alpha * A + beta * B
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
CsrMatrix scale_columns(const CsrMatrix& m, std::span<const double> d);
CsrMatrix scale_rows(const CsrMatrix& m, std::span<const double> d);

/// R * M * P evaluated as R * (M * P).
CsrMatrix triple_product(const CsrMatrix& r, const CsrMatrix& m, const CsrMatrix& p);

/// Galerkin coarse operator P^T M P for symmetric M. The result is
/// symmetrized as (X + X^T)/2; a relative asymmetry above 1e-10 before
/// symmetrization raises SetupError.
CsrMatrix galerkin_product(const CsrMatrix& p, const CsrMatrix& m);

/// max |m_ij - m_ji|.
double max_asymmetry(const CsrMatrix& m);
double max_abs(const CsrMatrix& m);

/// Entry i is 1 / sum_j M_ij. Nonpositive row sums raise Error.
Vector lumped_inverse_diag(const CsrMatrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace saddlemg
