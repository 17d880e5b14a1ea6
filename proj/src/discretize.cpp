#include "saddlemg/discretize.hpp"

#include <cmath>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

namespace {

struct Rule {
  int n;
  std::array<double, 3> x;
  std::array<double, 3> w;
};

const Rule kGauss2{2, {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0), 0.0}, {0.5, 0.5, 0.0}};
const Rule kGauss3{3,
                   {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)},
                   {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};

/// Calls f(s, weight) for every tensor point of the rule; axis `skip_axis`
/// (if any) is held at `fixed` and carries no weight.
template <class F>
void for_each_point(const Rule& rule, int dim, int skip_axis, double fixed, F&& f) {
  const int free_axes = skip_axis < 0 ? dim : dim - 1;
  int total = 1;
  for (int k = 0; k < free_axes; ++k) total *= rule.n;
  for (int idx = 0; idx < total; ++idx) {
    std::array<double, 3> s{0.0, 0.0, 0.0};
    double w = 1.0;
    int rest = idx;
    for (int a = 0; a < dim; ++a) {
      if (a == skip_axis) {
        s[a] = fixed;
        continue;
      }
      const int q = rest % rule.n;
      rest /= rule.n;
      s[a] = rule.x[q];
      w *= rule.w[q];
    }
    f(s, w);
  }
}

Point map_point(const Element& e, int dim, const std::array<double, 3>& s) {
  Point x = e.lower();
  const double h = e.size();
  for (int a = 0; a < dim; ++a) x[a] += h * s[a];
  return x;
}

double shape(int face, const std::array<double, 3>& s) {
  const double t = s[face / 2];
  return (face & 1) ? t : 1.0 - t;
}

/// Symmetric inverse of the leading dim x dim block via Cholesky.
Mat3 spd_inverse(const Mat3& k, int dim) {
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b)
      if (std::abs(k[a][b] - k[b][a]) > 1e-14 * (std::abs(k[a][b]) + std::abs(k[b][a])))
        throw ArgumentError("conductivity is not symmetric");
  Mat3 l{};
  for (int j = 0; j < dim; ++j) {
    double s = k[j][j];
    for (int m = 0; m < j; ++m) s -= l[j][m] * l[j][m];
    if (!(s > 0.0)) throw ArgumentError("conductivity is not positive definite");
    l[j][j] = std::sqrt(s);
    for (int i = j + 1; i < dim; ++i) {
      double t = k[i][j];
      for (int m = 0; m < j; ++m) t -= l[i][m] * l[j][m];
      l[i][j] = t / l[j][j];
    }
  }
  // Columns of L^{-1}, then K^{-1} = L^{-T} L^{-1}.
  Mat3 li{};
  for (int c = 0; c < dim; ++c) {
    for (int i = 0; i < dim; ++i) {
      double t = i == c ? 1.0 : 0.0;
      for (int m = 0; m < i; ++m) t -= l[i][m] * li[m][c];
      li[i][c] = t / l[i][i];
    }
  }
  Mat3 inv{};
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      double t = 0.0;
      for (int m = 0; m < dim; ++m) t += li[m][a] * li[m][b];
      inv[a][b] = t;
      inv[b][a] = t;
    }
  return inv;
}

Vector neumann_data(const DofMap& dofs, const ManufacturedProblem& problem) {
  Vector g(dofs.neumann_faces.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const FaceDof& f = dofs.faces[dofs.neumann_faces[k]];
    g[k] = problem.flux(f.center)[f.axis];
  }
  return g;
}

void check_match(const AdaptiveMesh& mesh, const DofMap& dofs, const ManufacturedProblem& problem) {
  if (dofs.dim != mesh.dim() || dofs.n_p != mesh.size() ||
      static_cast<int>(dofs.element_dofs.size()) != mesh.size())
    throw DimensionError("dof map does not match the mesh");
  if (problem.dim != mesh.dim()) throw DimensionError("problem dimension does not match the mesh");
}

}  // namespace

LocalMatrices local_element_matrices(const Element& e, int dim,
                                     const std::function<Mat3(const Point&)>& conductivity) {
  LocalMatrices m;
  m.n = 2 * dim;
  const double h = e.size();
  const double vol = std::pow(h, dim);
  for_each_point(kGauss2, dim, -1, 0.0, [&](const std::array<double, 3>& s, double w) {
    const Mat3 kinv = spd_inverse(conductivity(map_point(e, dim, s)), dim);
    for (int i = 0; i < m.n; ++i) {
      const double phi_i = shape(i, s);
      for (int j = i; j < m.n; ++j) m.a[i][j] += w * vol * kinv[i / 2][j / 2] * phi_i * shape(j, s);
    }
  });
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < i; ++j) m.a[i][j] = m.a[j][i];
  const double face_area = std::pow(h, dim - 1);
  for (int f = 0; f < m.n; ++f) m.b[f] = (f & 1) ? face_area : -face_area;
  return m;
}

Vector SaddleSystem::rhs() const {
  Vector r(rhs_u);
  r.insert(r.end(), rhs_p.begin(), rhs_p.end());
  return r;
}

SaddleSystem assemble_system(const AdaptiveMesh& mesh, const DofMap& dofs, const ManufacturedProblem& problem) {
  check_match(mesh, dofs, problem);
  const int dim = mesh.dim();
  SaddleSystem sys;
  sys.rhs_u.assign(dofs.n_u, 0.0);
  sys.rhs_p.assign(dofs.n_p, 0.0);
  sys.neumann_values = neumann_data(dofs, problem);
  const Vector& g = sys.neumann_values;

  std::vector<Triplet> ta, tb;
  ta.reserve(static_cast<std::size_t>(mesh.size()) * 4 * dim * dim);
  tb.reserve(static_cast<std::size_t>(mesh.size()) * 2 * dim);

  for (int e = 0; e < mesh.size(); ++e) {
    const Element& el = mesh.leaf(e);
    const LocalMatrices loc = local_element_matrices(el, dim, problem.conductivity);
    const auto& ed = dofs.element_dofs[e];
    for (int i = 0; i < loc.n; ++i) {
      const int di = ed[i];
      for (int j = 0; j < loc.n; ++j) {
        const int dj = ed[j];
        if (di >= 0 && dj >= 0) {
          ta.push_back({di, dj, loc.a[i][j]});
        } else if (di >= 0) {
          sys.rhs_u[di] -= loc.a[i][j] * g[-dj - 1];
        }
      }
      if (di >= 0)
        tb.push_back({e, di, loc.b[i]});
      else
        sys.rhs_p[e] -= loc.b[i] * g[-di - 1];
    }

    const double h = el.size();
    const double vol = std::pow(h, dim);
    double source = 0.0;
    for_each_point(kGauss2, dim, -1, 0.0, [&](const std::array<double, 3>& s, double w) {
      source += w * problem.source(map_point(el, dim, s));
    });
    sys.rhs_p[e] -= vol * source;

    const double area = std::pow(h, dim - 1);
    for (int f = 0; f < 2 * dim; ++f) {
      const FaceDof& face = dofs.faces[dofs.element_faces[e][f]];
      if (face.status != FaceStatus::BoundaryDirichlet) continue;
      const int axis = f / 2;
      const int side = f & 1;
      double p0 = 0.0;
      for_each_point(kGauss2, dim, axis, static_cast<double>(side), [&](const std::array<double, 3>& s, double w) {
        p0 += w * problem.pressure(map_point(el, dim, s));
      });
      sys.rhs_u[face.flux_index] += (side ? 1.0 : -1.0) * area * p0;
    }
  }

  sys.matrix = SaddleMatrix(CsrMatrix::from_triplets(dofs.n_u, dofs.n_u, ta),
                            CsrMatrix::from_triplets(dofs.n_p, dofs.n_u, tb), CsrMatrix(dofs.n_p, dofs.n_p));
  return sys;
}

Projection project_exact(const ManufacturedProblem& problem, const AdaptiveMesh& mesh, const DofMap& dofs) {
  check_match(mesh, dofs, problem);
  Projection out;
  out.u.resize(dofs.n_u);
  for (int k = 0; k < dofs.n_u; ++k) {
    const FaceDof& f = dofs.faces[dofs.flux_faces[k]];
    out.u[k] = problem.flux(f.center)[f.axis];
  }
  out.p.resize(dofs.n_p);
  for (int e = 0; e < mesh.size(); ++e) out.p[e] = problem.pressure(mesh.leaf(e).centroid(mesh.dim()));
  return out;
}

ErrorReport evaluate_errors(const AdaptiveMesh& mesh, const DofMap& dofs, std::span<const double> u_h,
                            std::span<const double> p_h, const ManufacturedProblem& problem) {
  check_match(mesh, dofs, problem);
  if (static_cast<int>(u_h.size()) != dofs.n_u || static_cast<int>(p_h.size()) != dofs.n_p)
    throw DimensionError("solution vectors do not match the dof map");
  const int dim = mesh.dim();
  const Vector g = neumann_data(dofs, problem);
  double eu = 0.0, ep = 0.0, eh = 0.0;
  for (int e = 0; e < mesh.size(); ++e) {
    const Element& el = mesh.leaf(e);
    const double h = el.size();
    const double vol = std::pow(h, dim);
    std::array<double, 6> U{};
    for (int f = 0; f < 2 * dim; ++f) {
      const int d = dofs.element_dofs[e][f];
      U[f] = d >= 0 ? u_h[d] : g[-d - 1];
    }
    for_each_point(kGauss3, dim, -1, 0.0, [&](const std::array<double, 3>& s, double w) {
      const Point x = map_point(el, dim, s);
      const Point u = problem.flux(x);
      const Mat3 du = problem.flux_gradient(x);
      for (int a = 0; a < dim; ++a) {
        const double uh = U[2 * a] * (1.0 - s[a]) + U[2 * a + 1] * s[a];
        eu += w * vol * (uh - u[a]) * (uh - u[a]);
        for (int b = 0; b < dim; ++b) {
          const double duh = a == b ? (U[2 * a + 1] - U[2 * a]) / h : 0.0;
          eh += w * vol * (duh - du[a][b]) * (duh - du[a][b]);
        }
      }
      const double dp = p_h[e] - problem.pressure(x);
      ep += w * vol * dp * dp;
    });
  }
  return {std::sqrt(eu), std::sqrt(ep), std::sqrt(eh)};
}

}  // namespace saddlemg
