#include "saddlemg/dense.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "saddlemg/error.hpp"

namespace saddlemg {

DenseMatrix to_dense(const CsrMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
  }
  return d;
}

DenseLU::DenseLU(DenseMatrix a) : n_(a.rows()), lu_(std::move(a)), perm_(n_) {
  if (lu_.rows() != lu_.cols()) throw DimensionError("DenseLU: matrix not square");
  std::iota(perm_.begin(), perm_.end(), 0);
  std::vector<double> row_norm(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) row_norm[i] = std::max(row_norm[i], std::abs(lu_(i, j)));

  for (int k = 0; k < n_; ++k) {
    int piv = k;
    for (int i = k + 1; i < n_; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double pivot = lu_(k, k);
    if (!(std::abs(pivot) > 1e-14 * row_norm[perm_[k]]) || row_norm[perm_[k]] == 0.0)
      throw SingularMatrixError("DenseLU: pivot " + std::to_string(pivot) + " at column " +
                                std::to_string(k) + " below tolerance");
    for (int i = k + 1; i < n_; ++i) {
      const double l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n_; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

void DenseLU::solve_in_place(std::span<double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionError("DenseLU::solve: size mismatch");
  std::vector<double> y(n_);
  for (int i = 0; i < n_; ++i) y[i] = x[perm_[i]];
  for (int i = 0; i < n_; ++i) {
    double s = y[i];
    for (int j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
    y[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < n_; ++j) s -= lu_(i, j) * y[j];
    y[i] = s / lu_(i, i);
  }
  std::copy(y.begin(), y.end(), x.begin());
}

Vector DenseLU::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace saddlemg
