#include "saddlemg/problem.hpp"

#include <cmath>
#include <numbers>

#include "saddlemg/autodiff.hpp"
#include "saddlemg/error.hpp"

namespace saddlemg {

namespace {

using D1 = Dual<double>;
using D2 = Dual<D1>;

template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Tensor = std::array<std::array<T, 3>, 3>;

template <class T>
Tensor<T> scaled_identity(const T& s) {
  Tensor<T> k{};
  for (auto& row : k) row.fill(T(0.0));
  for (int a = 0; a < 3; ++a) k[a][a] = s;
  return k;
}

template <class T>
T mollifier(const T& t) {
  using std::exp;
  if (value_of(t) <= 1e-300) return T(0.0);
  return exp(-1.0 / t);
}

template <class T>
T bump(const BumpParams& p, const Vec3<T>& x, int dim) {
  using std::sqrt;
  T r2(0.0);
  for (int a = 0; a < dim; ++a) {
    const T dx = x[a] - p.center[a];
    r2 = r2 + dx * dx;
  }
  const double r2v = value_of(r2);
  if (r2v <= p.inner * p.inner) return T(1.0 - p.contrast);
  if (r2v >= p.outer * p.outer) return T(1.0);
  const T r = sqrt(r2);
  const T hb = mollifier(p.outer - r);
  const T ha = mollifier(r - p.inner);
  return 1.0 - p.contrast * hb / (hb + ha);
}

struct Example1 {
  int dim;
  template <class T>
  T pressure(const Vec3<T>& x) const {
    T p = (x[0] * x[0] - x[0] * x[0] * x[0]) * (x[1] * x[1] - x[1] * x[1] * x[1]);
    if (dim == 3) p = p * (x[2] - x[2] * x[2]);
    return p;
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(1.0));
  }
};

struct Example2 {
  int dim;
  template <class T>
  T pressure(const Vec3<T>& x) const {
    const T one_minus_x = 1.0 - x[0];
    T p = x[0] * x[1] * (1.0 - x[1]) * one_minus_x * one_minus_x;
    if (dim == 3) p = p * (1.0 - x[2]);
    return p;
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(1.0));
  }
};

struct Example3 {
  int dim;
  template <class T>
  T pressure(const Vec3<T>& x) const {
    using std::exp;
    using std::sin;
    T p = exp(x[0]) * sin(x[1]);
    if (dim == 3) p = p * (1.0 + x[2] * x[2]);
    return p;
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>& x) const {
    using std::exp;
    using std::sin;
    Tensor<T> k = scaled_identity(T(0.0));
    const T off = sin(2.0 * std::numbers::pi * x[0]);
    k[0][0] = exp(x[0] / 2.0 + x[1] / 4.0);
    k[0][1] = off;
    k[1][0] = off;
    k[1][1] = exp(x[0] / 4.0 + x[1] / 2.0);
    if (dim == 3) k[2][2] = exp(x[2]);
    return k;
  }
};

struct Example4 {
  int dim;
  BumpParams params;
  template <class T>
  T pressure(const Vec3<T>& x) const {
    using std::exp;
    using std::sin;
    T p = sin(x[0]) * exp(x[1]);
    if (dim == 3) p = p * (1.0 + x[2] * x[2]);
    return p;
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>& x) const {
    return scaled_identity(bump(params, x, dim));
  }
};

struct Zero {
  template <class T>
  T pressure(const Vec3<T>&) const {
    return T(0.0);
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(1.0));
  }
};

struct Affine {
  template <class T>
  T pressure(const Vec3<T>& x) const {
    return 0.5 * (x[0] * x[0] - x[1] * x[1]);
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(1.0));
  }
};

struct ConstantFlux {
  template <class T>
  T pressure(const Vec3<T>& x) const {
    return x[0];
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(1.0));
  }
};

struct ScaledIdentity {
  Example1 base;
  double kappa;
  template <class T>
  T pressure(const Vec3<T>& x) const {
    return base.pressure(x);
  }
  template <class T>
  Tensor<T> conductivity(const Vec3<T>&) const {
    return scaled_identity(T(kappa));
  }
};

struct FluxEval {
  Vec3<D1> u;
};

template <class Def>
FluxEval evaluate_flux(const Def& def, const Point& x, int dim) {
  Vec3<D2> x2;
  Vec3<D1> x1;
  for (int a = 0; a < 3; ++a) {
    Vec3<double> seed{0.0, 0.0, 0.0};
    seed[a] = 1.0;
    x1[a] = D1(x[a], seed);
    x2[a] = D2(x1[a], {D1(seed[0]), D1(seed[1]), D1(seed[2])});
  }
  const D2 p = def.pressure(x2);
  const Tensor<D1> k = def.conductivity(x1);
  FluxEval out;
  for (int a = 0; a < 3; ++a) {
    D1 ua(0.0);
    if (a < dim)
      for (int b = 0; b < dim; ++b) ua = ua + k[a][b] * p.d[b];
    out.u[a] = ua;
  }
  return out;
}

template <class Def>
ManufacturedProblem build(std::string name, int dim, BoundarySpec boundary, Def def) {
  if (dim != 2 && dim != 3) throw ArgumentError("dimension must be 2 or 3");
  ManufacturedProblem p;
  p.name = std::move(name);
  p.dim = dim;
  p.boundary = boundary;
  p.pressure = [def](const Point& x) { return def.pressure(x); };
  p.flux = [def, dim](const Point& x) {
    const FluxEval f = evaluate_flux(def, x, dim);
    return Point{f.u[0].v, f.u[1].v, f.u[2].v};
  };
  p.flux_gradient = [def, dim](const Point& x) {
    const FluxEval f = evaluate_flux(def, x, dim);
    Mat3 g{};
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) g[a][b] = f.u[a].d[b];
    return g;
  };
  p.source = [def, dim](const Point& x) {
    const FluxEval f = evaluate_flux(def, x, dim);
    double div = 0.0;
    for (int a = 0; a < dim; ++a) div += f.u[a].d[a];
    return -div;
  };
  p.conductivity = [def, dim](const Point& x) {
    const Tensor<double> k = def.conductivity(x);
    Mat3 out{};
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out[a][b] = k[a][b];
    return out;
  };
  return p;
}

}  // namespace

double bump_value(const BumpParams& params, const Point& x, int dim) { return bump(params, x, dim); }

ManufacturedProblem make_example(int example, int dim, const BumpParams& params) {
  switch (example) {
    case 1: return build("example1", dim, BoundarySpec::all_dirichlet(), Example1{dim});
    case 2: return build("example2", dim, BoundarySpec::neumann_y(), Example2{dim});
    case 3: return build("example3", dim, BoundarySpec::all_dirichlet(), Example3{dim});
    case 4:
      if (!(params.contrast > 0.0 && params.contrast < 1.0)) throw ArgumentError("contrast must lie in (0, 1)");
      if (!(params.inner < params.outer)) throw ArgumentError("bump radii must satisfy inner < outer");
      return build("example4", dim, BoundarySpec::all_dirichlet(), Example4{dim, params});
    default: throw ArgumentError("unknown example " + std::to_string(example));
  }
}

ManufacturedProblem make_zero_problem(int dim) { return build("zero", dim, {}, Zero{}); }
ManufacturedProblem make_affine_problem(int dim) { return build("affine", dim, {}, Affine{}); }
ManufacturedProblem make_constant_flux_problem(int dim) { return build("constant_flux", dim, {}, ConstantFlux{}); }
ManufacturedProblem make_scaled_identity_problem(int dim, double kappa) {
  if (!(kappa > 0.0)) throw ArgumentError("kappa must be positive");
  return build("scaled_identity", dim, {}, ScaledIdentity{Example1{dim}, kappa});
}

}  // namespace saddlemg
