#pragma once

#include <span>
#include <vector>

#include "saddlemg/sparse.hpp"

namespace saddlemg {

/// Row-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::span<const double> data() const { return data_; }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix to_dense(const CsrMatrix& m);

/// LU factorization with partial pivoting. Construction throws
/// SingularMatrixError when a pivot falls below 1e-14 times the infinity
/// norm of the corresponding original row.
class DenseLU {
public:
  DenseLU() = default;
  explicit DenseLU(DenseMatrix a);

  int size() const { return n_; }
  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

private:
  int n_ = 0;
  DenseMatrix lu_;
  std::vector<int> perm_;
};

inline Vector dense_solve(const DenseLU& f, std::span<const double> b) { return f.solve(b); }

}  // namespace saddlemg
