#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "saddlemg/dense.hpp"
#include "saddlemg/error.hpp"
#include "saddlemg/matrix_market.hpp"
#include "saddlemg/sparse.hpp"

using namespace saddlemg;

namespace {

CsrMatrix laplace_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, -1.0});
    t.push_back({i, i, 2.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

CsrMatrix random_sparse(std::mt19937& rng, int rows, int cols, double density) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (coin(rng) < density) t.push_back({i, j, u(rng)});
  return CsrMatrix::from_triplets(rows, cols, t);
}

CsrMatrix from_dense(const Eigen::MatrixXd& d) {
  std::vector<Triplet> t;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j) t.push_back({i, j, d(i, j)});
  return CsrMatrix::from_triplets(static_cast<int>(d.rows()), static_cast<int>(d.cols()), t);
}

}  // namespace

TEST_CASE("csr construction keeps sorted columns and drops exact zeros") {
  const std::vector<Triplet> t{{0, 2, 1.0}, {0, 0, 3.0}, {1, 1, 0.0}, {0, 2, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}};
  const CsrMatrix m = CsrMatrix::from_triplets(2, 3, t);
  CHECK(m.nnz() == 2);
  CHECK(m.at(0, 0) == 3.0);
  CHECK(m.at(0, 2) == 3.0);
  CHECK(m.at(1, 0) == 0.0);
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(1, 1, std::vector<Triplet>{{0, 1, 1.0}}), Error);
}

TEST_CASE("spmv") {
  const Vector x{1.0, 1.0, 1.0};
  CHECK(spmv(CsrMatrix::identity(3), x) == x);
  CHECK(spmv(laplace_1d(3), x) == Vector{1.0, 0.0, 1.0});
  CHECK(spmv(CsrMatrix(3, 3), x) == Vector{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(spmv(laplace_1d(4), x), DimensionError);
}

TEST_CASE("transpose round trip") {
  CHECK(transpose(CsrMatrix::identity(4)) == CsrMatrix::identity(4));
  const CsrMatrix row = CsrMatrix::from_triplets(1, 3, std::vector<Triplet>{{0, 0, 1.0}, {0, 2, 5.0}});
  const CsrMatrix col = transpose(row);
  CHECK(col.rows() == 3);
  CHECK(col.cols() == 1);
  CHECK(col.at(2, 0) == 5.0);
  std::mt19937 rng(7);
  const CsrMatrix r = random_sparse(rng, 5, 7, 0.4);
  CHECK(transpose(transpose(r)) == r);
}

TEST_CASE("triple product against dense oracle") {
  SUBCASE("identity prolongation") {
    const CsrMatrix m = laplace_1d(6);
    CHECK(triple_product(CsrMatrix::identity(6), m, CsrMatrix::identity(6)) == m);
  }
  SUBCASE("1d laplace, linear interpolation from two coarse points") {
    // Coarse points 1 and 3 of 0..4; 0 and 4 take half of their only neighbor.
    const CsrMatrix p = CsrMatrix::from_triplets(
        5, 2, std::vector<Triplet>{{0, 0, 0.5}, {1, 0, 1.0}, {2, 0, 0.5}, {2, 1, 0.5}, {3, 1, 1.0}, {4, 1, 0.5}});
    const CsrMatrix m = laplace_1d(5);
    const Eigen::MatrixXd ref = oracle::dense(p).transpose() * oracle::dense(m) * oracle::dense(p);
    CHECK(oracle::rel_diff(oracle::dense(triple_product(transpose(p), m, p)), ref) <= 1e-12);
    CHECK(oracle::rel_diff(oracle::dense(galerkin_product(p, m)), ref) <= 1e-12);
  }
  SUBCASE("spd stays spd") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd g(8, 8), pd(8, 3);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) g(i, j) = u(rng);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 3; ++j) pd(i, j) = u(rng);
    const Eigen::MatrixXd spd = g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(8, 8);
    const CsrMatrix c = galerkin_product(from_dense(pd), from_dense(spd));
    CHECK(max_asymmetry(c) == 0.0);
    CHECK(oracle::min_sym_eig(oracle::dense(c)) > 0.0);
    CHECK(oracle::rel_diff(oracle::dense(c), pd.transpose() * spd * pd) <= 1e-12);
  }
  SUBCASE("associativity") {
    std::mt19937 rng(3);
    const CsrMatrix r = random_sparse(rng, 4, 9, 0.5);
    const CsrMatrix m = random_sparse(rng, 9, 9, 0.4);
    const CsrMatrix p = random_sparse(rng, 9, 5, 0.5);
    const Eigen::MatrixXd left = oracle::dense(multiply(multiply(r, m), p));
    const Eigen::MatrixXd right = oracle::dense(triple_product(r, m, p));
    CHECK(oracle::rel_diff(left, right) <= 1e-12);
  }
  CHECK_THROWS_AS(triple_product(CsrMatrix::identity(2), laplace_1d(3), CsrMatrix::identity(3)), DimensionError);
}

TEST_CASE("lumped inverse diagonal") {
  CHECK(lumped_inverse_diag(CsrMatrix::identity(3)) == Vector{1.0, 1.0, 1.0});
  const Vector d{2.0, 4.0};
  CHECK(lumped_inverse_diag(CsrMatrix::diagonal(d)) == Vector{0.5, 0.25});
  CHECK_THROWS_AS(lumped_inverse_diag(laplace_1d(3)), Error);  // interior row sum is zero
}

TEST_CASE("dense LU") {
  DenseMatrix id(3, 3);
  for (int i = 0; i < 3; ++i) id(i, i) = 1.0;
  const Vector b{1.0, -2.0, 3.0};
  CHECK(dense_solve(DenseLU(id), b) == b);

  DenseMatrix s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 1.0;
  s(1, 0) = 1.0;
  const Vector x = dense_solve(DenseLU(s), Vector{2.0, 1.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));

  DenseMatrix sing(2, 2);
  sing(0, 0) = sing(0, 1) = sing(1, 0) = sing(1, 1) = 1.0;
  CHECK_THROWS_AS(DenseLU{sing}, SingularMatrixError);

  // Solving against the matrix's own columns reproduces the identity.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = u(rng) + (i == j ? 3.0 : 0.0);
  const DenseLU f(a);
  for (int j = 0; j < 6; ++j) {
    Vector col(6);
    for (int i = 0; i < 6; ++i) col[i] = a(i, j);
    const Vector e = f.solve(col);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(e[i] - (i == j ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("kernels are bitwise deterministic") {
  std::mt19937 rng(9);
  const CsrMatrix a = random_sparse(rng, 30, 30, 0.2);
  const CsrMatrix p = random_sparse(rng, 30, 8, 0.3);
  CHECK(galerkin_product(p, add(a, transpose(a))) == galerkin_product(p, add(a, transpose(a))));
  Vector x(30);
  for (int i = 0; i < 30; ++i) x[i] = std::sin(i + 1.0);
  CHECK(spmv(a, x) == spmv(a, x));
}

TEST_CASE("matrix market round trip") {
  std::mt19937 rng(1);
  const CsrMatrix m = random_sparse(rng, 6, 4, 0.5);
  std::stringstream ss;
  write_matrix_market(ss, m);
  CHECK(read_matrix_market(ss) == m);
  const Vector v{0.1, -1.0 / 3.0, 1e-300};
  std::stringstream sv;
  write_vector(sv, v);
  CHECK(read_vector(sv) == v);
}
