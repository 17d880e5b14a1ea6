// Dense reference computations shared by the unit and acceptance tests.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "saddlemg/sparse.hpp"
#include "saddlemg/spamg.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const saddlemg::CsrMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    auto c = m.row_cols(i);
    auto v = m.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) d(i, c[k]) = v[k];
  }
  return d;
}

inline Eigen::VectorXd vec(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// max |a - b| / max(max|b|, tiny)
inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  return rel_diff(Eigen::MatrixXd(vec(a)), Eigen::MatrixXd(vec(b)));
}

inline double min_sym_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_abs_sym_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Dense matrix of a linear map given by its action on unit vectors.
inline Eigen::MatrixXd operator_matrix(int n, const std::function<void(std::span<double>)>& apply_in_place) {
  Eigen::MatrixXd m(n, n);
  saddlemg::Vector x(n);
  for (int k = 0; k < n; ++k) {
    std::fill(x.begin(), x.end(), 0.0);
    x[k] = 1.0;
    apply_in_place(x);
    for (int i = 0; i < n; ++i) m(i, k) = x[i];
  }
  return m;
}

/// Error propagation of one smoothing step: e -> x(e) with zero right-hand side.
inline Eigen::MatrixXd smoother_propagation(const saddlemg::SpamgLevel& level,
                                            const std::function<void(std::span<double>, std::span<const double>)>& sweep) {
  const int n = level.matrix.size();
  const saddlemg::Vector zero(n, 0.0);
  return operator_matrix(n, [&](std::span<double> x) { sweep(x, zero); });
}

/// Dense saddle matrix [[A, B^T], [B, -C]].
inline Eigen::MatrixXd saddle(const saddlemg::SaddleMatrix& m) {
  const int nu = m.n_u();
  const int np = m.n_p();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nu + np, nu + np);
  d.topLeftCorner(nu, nu) = dense(m.A);
  const Eigen::MatrixXd b = dense(m.B);
  d.bottomLeftCorner(np, nu) = b;
  d.topRightCorner(nu, np) = b.transpose();
  if (m.C.rows() == np && m.C.cols() == np) d.bottomRightCorner(np, np) = -dense(m.C);
  return d;
}

}  // namespace oracle
