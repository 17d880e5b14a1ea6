#pragma once

#include <array>
#include <functional>
#include <string>

#include "saddlemg/mesh.hpp"

namespace saddlemg {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Smooth radial contrast m(x) = 1 - c h(b-r) / (h(b-r) + h(r-a)),
/// h(t) = exp(-1/t) for t > 0, r = |x - center|.
struct BumpParams {
  Point center{0.5, 0.5, 0.5};
  double inner = 0.125;
  double outer = 0.25;
  double contrast = 0.999;
};

double bump_value(const BumpParams& bump, const Point& x, int dim);

/// Exact solution of -div(K grad p) = f with flux u = K grad p. All derived
/// quantities come from automatic differentiation of the pressure and K.
/// Entries beyond `dim` are zero.
struct ManufacturedProblem {
  std::string name;
  int dim = 2;
  BoundarySpec boundary;
  std::function<double(const Point&)> pressure;
  std::function<Point(const Point&)> flux;
  /// [a][b] = d u_a / d x_b
  std::function<Mat3(const Point&)> flux_gradient;
  std::function<double(const Point&)> source;
  std::function<Mat3(const Point&)> conductivity;
};

/// Benchmark examples 1 to 4. Example 2 carries Neumann data on y = 0 and y = 1.
ManufacturedProblem make_example(int example, int dim, const BumpParams& bump = {});

/// p = 0, K = I.
ManufacturedProblem make_zero_problem(int dim);
/// p = (x^2 - y^2)/2, u = (x, -y, 0): divergence free and exactly representable.
ManufacturedProblem make_affine_problem(int dim);
/// p = x, u = (1, 0, 0).
ManufacturedProblem make_constant_flux_problem(int dim);
/// Example 1 pressure with K = kappa I.
ManufacturedProblem make_scaled_identity_problem(int dim, double kappa);

}  // namespace saddlemg
