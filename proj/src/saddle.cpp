#include "saddlemg/saddle.hpp"

#include "saddlemg/error.hpp"

namespace saddlemg {

SaddleMatrix::SaddleMatrix(CsrMatrix a, CsrMatrix b, CsrMatrix c)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), Bt(transpose(B)) {
  if (A.rows() != A.cols() || B.cols() != A.rows() || C.rows() != B.rows() || C.cols() != B.rows())
    throw DimensionError("saddle blocks do not conform");
}

void SaddleMatrix::apply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != size() || static_cast<int>(y.size()) != size())
    throw DimensionError("saddle apply: size mismatch");
  const int nu = n_u();
  auto xu = x.first(nu);
  auto xp = x.subspan(nu);
  auto yu = y.first(nu);
  auto yp = y.subspan(nu);
  spmv_into(A, xu, yu);
  spmv_into(Bt, xp, yu, 1.0, 1.0);
  spmv_into(B, xu, yp);
  if (C.nnz() > 0) spmv_into(C, xp, yp, -1.0, 1.0);
}

Vector SaddleMatrix::apply(std::span<const double> x) const {
  Vector y(size());
  apply(x, y);
  return y;
}

void SaddleMatrix::residual(std::span<const double> b, std::span<const double> x, std::span<double> y) const {
  apply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = b[i] - y[i];
}

CsrMatrix SaddleMatrix::assemble() const {
  const int nu = n_u();
  std::vector<Triplet> t;
  t.reserve(A.nnz() + 2 * B.nnz() + C.nnz());
  for (int i = 0; i < nu; ++i) {
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.push_back({i, cols[k], vals[k]});
    auto bc = Bt.row_cols(i);
    auto bv = Bt.row_values(i);
    for (std::size_t k = 0; k < bc.size(); ++k) t.push_back({i, nu + bc[k], bv[k]});
  }
  for (int j = 0; j < n_p(); ++j) {
    auto cols = B.row_cols(j);
    auto vals = B.row_values(j);
    for (std::size_t k = 0; k < cols.size(); ++k) t.push_back({nu + j, cols[k], vals[k]});
    auto cc = C.row_cols(j);
    auto cv = C.row_values(j);
    for (std::size_t k = 0; k < cc.size(); ++k) t.push_back({nu + j, nu + cc[k], -cv[k]});
  }
  return CsrMatrix::from_triplets(size(), size(), t);
}

}  // namespace saddlemg
