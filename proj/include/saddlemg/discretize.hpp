#pragma once

#include <array>
#include <functional>
#include <span>

#include "saddlemg/mesh.hpp"
#include "saddlemg/problem.hpp"
#include "saddlemg/saddle.hpp"

namespace saddlemg {

/// Element matrices in local face order f = 2*axis + side. The basis function
/// of face f is the normal-component shape (1 - s) e_a on the lower face and
/// s e_a on the upper face, s the local coordinate along the axis.
struct LocalMatrices {
  int n = 0;
  std::array<std::array<double, 6>, 6> a{};
  std::array<double, 6> b{};
};

/// Two-point tensor Gauss integration of K^{-1}. Throws ArgumentError when K
/// fails a Cholesky test at a quadrature point.
LocalMatrices local_element_matrices(const Element& e, int dim, const std::function<Mat3(const Point&)>& conductivity);

struct SaddleSystem {
  SaddleMatrix matrix;
  Vector rhs_u;
  Vector rhs_p;
  /// Prescribed normal flux per Neumann slot.
  Vector neumann_values;

  /// (rhs_u, rhs_p) stacked.
  Vector rhs() const;
};

SaddleSystem assemble_system(const AdaptiveMesh& mesh, const DofMap& dofs, const ManufacturedProblem& problem);

struct Projection {
  Vector u;
  Vector p;
};

/// Face-center normal flux on the free faces and element-center pressure.
Projection project_exact(const ManufacturedProblem& problem, const AdaptiveMesh& mesh, const DofMap& dofs);

struct ErrorReport {
  double l2_u = 0.0;
  double l2_p = 0.0;
  double h1broken_u = 0.0;
};

/// Three-point tensor Gauss per element. Neumann faces take the exact flux
/// values used during assembly.
ErrorReport evaluate_errors(const AdaptiveMesh& mesh, const DofMap& dofs, std::span<const double> u_h,
                            std::span<const double> p_h, const ManufacturedProblem& problem);

}  // namespace saddlemg
