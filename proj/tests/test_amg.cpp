#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "saddlemg/amg.hpp"
#include "saddlemg/error.hpp"

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

// 5-point stencil on an m x m grid with coupling eps in y.
CsrMatrix poisson_2d(int m, double eps = 1.0) {
  std::vector<Triplet> t;
  auto id = [m](int x, int y) { return y * m + x; };
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      const int i = id(x, y);
      if (y > 0) t.push_back({i, id(x, y - 1), -eps});
      if (x > 0) t.push_back({i, id(x - 1, y), -1.0});
      t.push_back({i, i, 2.0 + 2.0 * eps});
      if (x + 1 < m) t.push_back({i, id(x + 1, y), -1.0});
      if (y + 1 < m) t.push_back({i, id(x, y + 1), -eps});
    }
  return CsrMatrix::from_triplets(m * m, m * m, t);
}

std::vector<int> strong_of(const StrengthGraph& s, int i) {
  const auto r = s.row(i);
  return {r.begin(), r.end()};
}

double residual_norm(const CsrMatrix& m, std::span<const double> b, std::span<const double> x) {
  Vector r = spmv(m, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace

TEST_CASE("strength of connection") {
  const Vector d{1.0, 2.0, 3.0};
  const StrengthGraph sd = strength_connections(CsrMatrix::diagonal(d));
  CHECK(sd.idx.empty());

  const StrengthGraph s1 = strength_connections(laplace_1d(5), 0.25);
  CHECK(strong_of(s1, 2) == std::vector<int>{1, 3});
  CHECK(strong_of(s1, 0) == std::vector<int>{1});

  // Weak y coupling: only the x neighbors are strong.
  const StrengthGraph sa = strength_connections(poisson_2d(5, 0.01), 0.25);
  CHECK(strong_of(sa, 12) == std::vector<int>{11, 13});

  // Positive off-diagonals never count.
  const CsrMatrix pos = CsrMatrix::from_triplets(
      2, 2, std::vector<Triplet>{{0, 0, 1.0}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 1.0}});
  CHECK(strength_connections(pos).idx.empty());
}

TEST_CASE("ruge-stueben coarsening") {
  SUBCASE("1d laplace n = 9") {
    const CfSplit s = rs_coarsen(strength_connections(laplace_1d(9)));
    // Frozen from the first run: C at the odd points.
    CHECK(s.n_coarse == 4);
    for (int i = 0; i < 9; ++i) CHECK(static_cast<bool>(s.coarse[i]) == (i % 2 == 1));
  }
  SUBCASE("diagonal matrix is all F") {
    const Vector d(6, 2.0);
    const CfSplit s = rs_coarsen(strength_connections(CsrMatrix::diagonal(d)));
    CHECK(s.n_coarse == 0);
    const CsrMatrix p = build_interpolation(CsrMatrix::diagonal(d), strength_connections(CsrMatrix::diagonal(d)), s);
    CHECK(p.nnz() == 0);
  }
  SUBCASE("every strongly connected F point sees a strong C point") {
    for (const CsrMatrix& m : {poisson_2d(20), poisson_2d(17, 0.01), laplace_1d(40)}) {
      const StrengthGraph g = strength_connections(m);
      const CfSplit s = rs_coarsen(g);
      for (int i = 0; i < s.size(); ++i) {
        if (s.coarse[i] || g.row(i).empty()) continue;
        bool has_c = false;
        for (int j : g.row(i)) has_c = has_c || s.coarse[j];
        CHECK(has_c);
        // Strong F-F pairs share a strong C point.
        for (int j : g.row(i)) {
          if (s.coarse[j]) continue;
          bool shared = false;
          for (int k : g.row(i))
            if (s.coarse[k])
              for (int q : g.row(j)) shared = shared || q == k;
          CHECK(shared);
        }
      }
    }
  }
}

TEST_CASE("interpolation") {
  SUBCASE("1d laplace") {
    const CsrMatrix m = laplace_1d(9);
    const StrengthGraph g = strength_connections(m);
    const CfSplit s = rs_coarsen(g);
    const CsrMatrix p = build_interpolation(m, g, s);
    CHECK(p.rows() == 9);
    CHECK(p.cols() == 4);
    CHECK(p.at(1, 0) == 1.0);
    CHECK(p.row_cols(1).size() == 1);
    CHECK(p.at(2, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.at(2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("truncation keeps the row sum") {
    // Raw weights 0.9 and 0.04; 0.04 < 0.045 is dropped, 0.9 becomes 0.94.
    const CsrMatrix m = CsrMatrix::from_triplets(
        3, 3, std::vector<Triplet>{{0, 0, 1.0}, {0, 1, -0.9}, {0, 2, -0.04}, {1, 1, 1.0}, {2, 2, 1.0}});
    const StrengthGraph g = strength_connections(m, 0.01);
    CfSplit s;
    s.coarse = {0, 1, 1};
    s.coarse_index = {-1, 0, 1};
    s.n_coarse = 2;
    const CsrMatrix p = build_interpolation(m, g, s, 0.05);
    CHECK(p.row_cols(0).size() == 1);
    CHECK(p.at(0, 0) == doctest::Approx(0.94).epsilon(1e-15));
    const CsrMatrix untruncated = build_interpolation(m, g, s, 0.0);
    CHECK(untruncated.at(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(untruncated.at(0, 1) == doctest::Approx(0.04).epsilon(1e-15));
  }
  SUBCASE("truncation never changes a row sum") {
    const CsrMatrix m = poisson_2d(15, 0.3);
    const StrengthGraph g = strength_connections(m);
    const CfSplit s = rs_coarsen(g);
    const CsrMatrix full = build_interpolation(m, g, s, 0.0);
    const CsrMatrix cut = build_interpolation(m, g, s, 0.5);
    CHECK(cut.nnz() < full.nnz());
    for (int i = 0; i < m.rows(); ++i) {
      auto a = full.row_values(i);
      auto b = cut.row_values(i);
      CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(std::accumulate(b.begin(), b.end(), 0.0)).epsilon(1e-14));
    }
  }
  SUBCASE("C rows are identity and P has full column rank") {
    const CsrMatrix m = poisson_2d(12);
    const StrengthGraph g = strength_connections(m);
    const CfSplit s = rs_coarsen(g);
    const CsrMatrix p = build_interpolation(m, g, s);
    for (int i = 0; i < m.rows(); ++i) {
      if (!s.coarse[i]) continue;
      CHECK(p.row_cols(i).size() == 1);
      CHECK(p.at(i, s.coarse_index[i]) == 1.0);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(oracle::dense(p));
    CHECK(lu.rank() == s.n_coarse);
  }
}

TEST_CASE("amg hierarchy") {
  SUBCASE("small input is solved directly") {
    const CsrMatrix m = poisson_2d(28);  // 784 unknowns
    const AmgHierarchy h = amg_setup(m);
    CHECK(h.num_levels() == 1);
    Vector b(m.rows());
    for (int i = 0; i < m.rows(); ++i) b[i] = std::cos(0.1 * i);
    Vector x(m.rows(), 0.0);
    amg_vcycle(h, b, x);
    CHECK(residual_norm(m, b, x) <= 1e-12 * norm2(b));
  }
  SUBCASE("identity input") {
    const CsrMatrix id = CsrMatrix::identity(1500);
    const AmgHierarchy h = amg_setup(id);
    CHECK(h.num_levels() == 1);
    Vector b(1500, 1.0), x(1500, 0.0);
    amg_vcycle(h, b, x);
    CHECK(x == b);
  }
  SUBCASE("64 x 64 poisson") {
    const CsrMatrix m = poisson_2d(64);
    const AmgHierarchy h = amg_setup(m);
    CHECK(h.num_levels() >= 3);
    CHECK(h.levels.back().matrix.rows() <= 1000);
    CHECK(h.direct_coarse);
    Vector b(m.rows());
    for (int i = 0; i < m.rows(); ++i) b[i] = std::sin(0.37 * i) + 0.5;
    Vector x(m.rows(), 0.0);
    double r0 = norm2(b);
    for (int cycle = 0; cycle < 5; ++cycle) {
      amg_vcycle(h, b, x);
      const double r1 = residual_norm(m, b, x);
      CHECK(r1 <= 0.25 * r0);
      r0 = r1;
    }
  }
  SUBCASE("galerkin levels against the dense oracle") {
    AmgOptions o;
    o.coarse_size = 20;
    const CsrMatrix m = poisson_2d(20);
    const AmgHierarchy h = amg_setup(m, o);
    REQUIRE(h.num_levels() >= 3);
    for (int l = 0; l + 1 < h.num_levels(); ++l) {
      const Eigen::MatrixXd p = oracle::dense(h.levels[l].P);
      const Eigen::MatrixXd ref = p.transpose() * oracle::dense(h.levels[l].matrix) * p;
      const Eigen::MatrixXd coarse = oracle::dense(h.levels[l + 1].matrix);
      CHECK(oracle::rel_diff(coarse, ref) <= 1e-12);
      CHECK(max_asymmetry(h.levels[l + 1].matrix) <= 1e-10 * max_abs(h.levels[l + 1].matrix));
      CHECK(oracle::min_sym_eig(coarse) > 0.0);
    }
    CHECK(h.operator_complexity() > 1.0);
  }
  CHECK_THROWS_AS(amg_setup(CsrMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}})),
                  SetupError);
}

TEST_CASE("v-cycle properties") {
  AmgOptions o;
  o.coarse_size = 30;
  const CsrMatrix m = poisson_2d(24);
  const AmgHierarchy h = amg_setup(m, o);
  REQUIRE(h.num_levels() >= 2);
  const int n = m.rows();
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = std::sin(1.3 * i) * (1.0 + 0.01 * i);

  SUBCASE("zero right-hand side") {
    Vector zero(n, 0.0), x(n, 0.0);
    amg_vcycle(h, zero, x);
    for (double v : x) CHECK(v == 0.0);
  }
  SUBCASE("linearity") {
    Vector x1(n, 0.0), x2(n, 0.0), b2(b);
    for (double& v : b2) v *= -3.5;
    amg_vcycle(h, b, x1);
    amg_vcycle(h, b2, x2);
    for (double& v : x1) v *= -3.5;
    CHECK(oracle::rel_diff(x2, x1) <= 1e-13);
  }
  SUBCASE("energy norm of the error does not grow") {
    const Eigen::MatrixXd md = oracle::dense(m);
    const Eigen::VectorXd exact = md.ldlt().solve(oracle::vec(b));
    Vector x(n, 0.0);
    double energy = exact.dot(md * exact);
    for (int cycle = 0; cycle < 4; ++cycle) {
      amg_vcycle(h, b, x);
      const Eigen::VectorXd e = exact - oracle::vec(x);
      const double next = e.dot(md * e);
      CHECK(next <= energy);
      energy = next;
    }
  }
}
