#pragma once

#include <span>

#include "saddlemg/sparse.hpp"

namespace saddlemg {

/// Block operator [[A, B^T], [B, -C]] acting on (u, p) stacked as one vector.
/// An empty C (no stored entries) stands for the zero block.
struct SaddleMatrix {
  CsrMatrix A;
  CsrMatrix B;
  CsrMatrix C;
  /// B^T, cached because both products are needed in every application.
  CsrMatrix Bt;

  SaddleMatrix() = default;
  SaddleMatrix(CsrMatrix a, CsrMatrix b, CsrMatrix c);

  int n_u() const { return A.rows(); }
  int n_p() const { return B.rows(); }
  int size() const { return n_u() + n_p(); }

  void apply(std::span<const double> x, std::span<double> y) const;
  Vector apply(std::span<const double> x) const;
  /// y = b - M x
  void residual(std::span<const double> b, std::span<const double> x, std::span<double> y) const;

  /// Monolithic CSR form.
  CsrMatrix assemble() const;
};

}  // namespace saddlemg
