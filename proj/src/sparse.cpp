#include "saddlemg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw DimensionError(what);
}

}  // namespace

CsrMatrix::CsrMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows), cols_(cols) {
  require(row_ptr.size() == static_cast<std::size_t>(rows) + 1, "csr: row_ptr size");
  require(col_idx.size() == values.size(), "csr: col/value size mismatch");
  require(row_ptr.front() == 0 && static_cast<std::size_t>(row_ptr.back()) == col_idx.size(),
          "csr: row_ptr bounds");
  row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  col_idx_.reserve(col_idx.size());
  values_.reserve(values.size());
  for (int i = 0; i < rows; ++i) {
    int last = -1;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = col_idx[k];
      if (j <= last || j >= cols) throw DimensionError("csr: column indices must increase within a row");
      last = j;
      if (values[k] == 0.0) continue;
      col_idx_.push_back(j);
      values_.push_back(values[k]);
    }
    row_ptr_[i + 1] = static_cast<int>(col_idx_.size());
  }
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> ptr(n + 1), idx(n);
  std::iota(ptr.begin(), ptr.end(), 0);
  std::iota(idx.begin(), idx.end(), 0);
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> ptr(n + 1), idx(n);
  std::iota(ptr.begin(), ptr.end(), 0);
  std::iota(idx.begin(), idx.end(), 0);
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(d.begin(), d.end()));
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::span<const Triplet> entries) {
  // Stable counting sort by row, then stable sort by column within each row.
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("triplet index out of range");
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(entries.size());
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < entries.size(); ++k) order[next[entries[k].row]++] = static_cast<int>(k);
  }
  std::vector<int> ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  idx.reserve(entries.size());
  val.reserve(entries.size());
  for (int i = 0; i < rows; ++i) {
    auto first = order.begin() + count[i];
    auto last = order.begin() + count[i + 1];
    std::stable_sort(first, last, [&](int a, int b) { return entries[a].col < entries[b].col; });
    for (auto it = first; it != last;) {
      const int col = entries[*it].col;
      double sum = 0.0;
      for (; it != last && entries[*it].col == col; ++it) sum += entries[*it].value;
      if (sum != 0.0) {
        idx.push_back(col);
        val.push_back(sum);
      }
    }
    ptr[i + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

double CsrMatrix::at(int i, int j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + (it - cols.begin())];
}

Vector CsrMatrix::diagonal_values() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

Vector spmv(const CsrMatrix& m, std::span<const double> x) {
  Vector y(m.rows(), 0.0);
  spmv_into(m, x, y);
  return y;
}

void spmv_into(const CsrMatrix& m, std::span<const double> x, std::span<double> y, double alpha,
               double beta) {
  require(static_cast<int>(x.size()) == m.cols() && static_cast<int>(y.size()) == m.rows(),
          "spmv: dimension mismatch");
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = (beta == 0.0 ? 0.0 : beta * y[i]) + alpha * s;
  }
}

CsrMatrix transpose(const CsrMatrix& m) {
  std::vector<int> ptr(static_cast<std::size_t>(m.cols()) + 1, 0);
  for (int j : m.col_idx()) ++ptr[j + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<int> idx(m.nnz());
  std::vector<double> val(m.nnz());
  std::vector<int> next(ptr.begin(), ptr.end() - 1);
  for (int i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int dst = next[cols[k]]++;
      idx[dst] = i;
      val[dst] = vals[k];
    }
  }
  return CsrMatrix(m.cols(), m.rows(), std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimensions differ");
  const int n = a.rows();
  const int m = b.cols();
  std::vector<double> acc(m, 0.0);
  std::vector<int> marker(m, -1);
  std::vector<int> pattern;
  std::vector<int> ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  for (int i = 0; i < n; ++i) {
    pattern.clear();
    auto acols = a.row_cols(i);
    auto avals = a.row_values(i);
    for (std::size_t ka = 0; ka < acols.size(); ++ka) {
      const int k = acols[ka];
      const double aik = avals[ka];
      auto bcols = b.row_cols(k);
      auto bvals = b.row_values(k);
      for (std::size_t kb = 0; kb < bcols.size(); ++kb) {
        const int j = bcols[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          pattern.push_back(j);
        }
        acc[j] += aik * bvals[kb];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (int j : pattern) {
      if (acc[j] == 0.0) continue;
      idx.push_back(j);
      val.push_back(acc[j]);
    }
    ptr[i + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(n, m, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  std::vector<int> ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  idx.reserve(a.nnz() + b.nnz());
  val.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    auto bc = b.row_cols(i);
    auto bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      int j;
      double v;
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        j = ac[p];
        v = alpha * av[p++];
      } else if (p == ac.size() || bc[q] < ac[p]) {
        j = bc[q];
        v = beta * bv[q++];
      } else {
        j = ac[p];
        v = alpha * av[p++] + beta * bv[q++];
      }
      if (v == 0.0) continue;
      idx.push_back(j);
      val.push_back(v);
    }
    ptr[i + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix scale_columns(const CsrMatrix& m, std::span<const double> d) {
  require(static_cast<int>(d.size()) == m.cols(), "scale_columns: size");
  std::vector<int> ptr(m.row_ptr().begin(), m.row_ptr().end());
  std::vector<int> idx(m.col_idx().begin(), m.col_idx().end());
  std::vector<double> val(m.values().begin(), m.values().end());
  for (std::size_t k = 0; k < val.size(); ++k) val[k] *= d[idx[k]];
  return CsrMatrix(m.rows(), m.cols(), std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix scale_rows(const CsrMatrix& m, std::span<const double> d) {
  require(static_cast<int>(d.size()) == m.rows(), "scale_rows: size");
  std::vector<int> ptr(m.row_ptr().begin(), m.row_ptr().end());
  std::vector<int> idx(m.col_idx().begin(), m.col_idx().end());
  std::vector<double> val(m.values().begin(), m.values().end());
  for (int i = 0; i < m.rows(); ++i)
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) val[k] *= d[i];
  return CsrMatrix(m.rows(), m.cols(), std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix triple_product(const CsrMatrix& r, const CsrMatrix& m, const CsrMatrix& p) {
  require(r.cols() == m.rows() && m.cols() == p.rows(), "triple_product: dimension mismatch");
  return multiply(r, multiply(m, p));
}

double max_abs(const CsrMatrix& m) {
  double s = 0.0;
  for (double v : m.values()) s = std::max(s, std::abs(v));
  return s;
}

double max_asymmetry(const CsrMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("max_asymmetry: matrix not square");
  const CsrMatrix d = add(m, transpose(m), 1.0, -1.0);
  return max_abs(d);
}

CsrMatrix galerkin_product(const CsrMatrix& p, const CsrMatrix& m) {
  const CsrMatrix x = triple_product(transpose(p), m, p);
  const CsrMatrix xt = transpose(x);
  const double scale = max_abs(x);
  const double asym = max_abs(add(x, xt, 1.0, -1.0));
  if (asym > 1e-10 * scale)
    throw SetupError("galerkin_product: relative asymmetry " + std::to_string(asym / scale) +
                     " exceeds 1e-10");
  return add(x, xt, 0.5, 0.5);
}

Vector lumped_inverse_diag(const CsrMatrix& m) {
  Vector d(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row_values(i)) s += v;
    if (!(s > 0.0)) throw Error("lumped_inverse_diag: nonpositive row sum in row " + std::to_string(i));
    d[i] = 1.0 / s;
  }
  return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace saddlemg
