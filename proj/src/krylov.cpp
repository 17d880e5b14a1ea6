#include "saddlemg/krylov.hpp"

#include <cmath>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

const char* pc_name(PcKind kind) {
  switch (kind) {
    case PcKind::None: return "none";
    case PcKind::Diag: return "diag";
    case PcKind::Schur: return "schur";
    case PcKind::SpamgUzawa: return "spamg-uzawa";
    case PcKind::SpamgVankaOne: return "spamg-vanka1";
    case PcKind::SpamgVankaScale: return "spamg-vankas";
  }
  return "?";
}

std::optional<PcKind> parse_pc(const std::string& name) {
  for (PcKind k : {PcKind::None, PcKind::Diag, PcKind::Schur, PcKind::SpamgUzawa, PcKind::SpamgVankaOne,
                   PcKind::SpamgVankaScale})
    if (name == pc_name(k)) return k;
  return std::nullopt;
}

namespace {

void check_sizes(const SaddleMatrix& m, std::span<const double> r, std::span<double> z) {
  if (static_cast<int>(r.size()) != m.size() || static_cast<int>(z.size()) != m.size())
    throw DimensionError("preconditioner: size mismatch");
}

}  // namespace

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != z.size()) throw DimensionError("preconditioner: size mismatch");
  std::copy(r.begin(), r.end(), z.begin());
}

DiagPreconditioner::DiagPreconditioner(const SaddleMatrix& m) : inv_lumped_(lumped_inverse_diag(m.A)) {
  inv_schur_diag_.assign(m.n_p(), 0.0);
  for (int j = 0; j < m.n_p(); ++j) {
    auto c = m.B.row_cols(j);
    auto v = m.B.row_values(j);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * v[k] * inv_lumped_[c[k]];
    if (!(s > 0.0)) throw SetupError("diag preconditioner: empty divergence row " + std::to_string(j));
    inv_schur_diag_[j] = 1.0 / s;
  }
}

void DiagPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t nu = inv_lumped_.size();
  if (r.size() != nu + inv_schur_diag_.size() || z.size() != r.size())
    throw DimensionError("preconditioner: size mismatch");
  for (std::size_t i = 0; i < nu; ++i) z[i] = inv_lumped_[i] * r[i];
  for (std::size_t j = 0; j < inv_schur_diag_.size(); ++j) z[nu + j] = -inv_schur_diag_[j] * r[nu + j];
}

SchurPreconditioner::SchurPreconditioner(const SaddleMatrix& m, const AmgOptions& options)
    : inv_lumped_(lumped_inverse_diag(m.A)) {
  Vector inv_diag = m.A.diagonal_values();
  for (double& d : inv_diag) d = 1.0 / d;
  const CsrMatrix s = multiply(scale_columns(m.B, inv_diag), m.Bt);
  schur_ = add(s, transpose(s), 0.5, 0.5);
  amg_ = amg_setup(schur_, options);
}

void SchurPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t nu = inv_lumped_.size();
  const std::size_t np = static_cast<std::size_t>(schur_.rows());
  if (r.size() != nu + np || z.size() != r.size()) throw DimensionError("preconditioner: size mismatch");
  for (std::size_t i = 0; i < nu; ++i) z[i] = inv_lumped_[i] * r[i];
  auto zp = z.subspan(nu);
  std::fill(zp.begin(), zp.end(), 0.0);
  amg_vcycle(amg_, r.subspan(nu), zp);
  for (double& v : zp) v = -v;
}

SpamgPreconditioner::SpamgPreconditioner(const SaddleMatrix& m, const SpamgOptions& options)
    : h_(spamg_setup(m, options)) {}

PcKind SpamgPreconditioner::kind() const {
  switch (h_.options.smoother) {
    case SmootherKind::Uzawa: return PcKind::SpamgUzawa;
    case SmootherKind::VankaOne: return PcKind::SpamgVankaOne;
    case SmootherKind::VankaScale: return PcKind::SpamgVankaScale;
  }
  return PcKind::SpamgVankaOne;
}

void SpamgPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  check_sizes(h_.levels.front().matrix, r, z);
  std::fill(z.begin(), z.end(), 0.0);
  spamg_vcycle(h_, r, z);
}

std::unique_ptr<Preconditioner> make_preconditioner(PcKind kind, const SaddleMatrix& m,
                                                    const PreconditionerOptions& options) {
  SpamgOptions so = options.spamg;
  switch (kind) {
    case PcKind::None: return std::make_unique<IdentityPreconditioner>();
    case PcKind::Diag: return std::make_unique<DiagPreconditioner>(m);
    case PcKind::Schur: return std::make_unique<SchurPreconditioner>(m, options.amg);
    case PcKind::SpamgUzawa: so.smoother = SmootherKind::Uzawa; break;
    case PcKind::SpamgVankaOne: so.smoother = SmootherKind::VankaOne; break;
    case PcKind::SpamgVankaScale: so.smoother = SmootherKind::VankaScale; break;
  }
  return std::make_unique<SpamgPreconditioner>(m, so);
}

GmresResult gmres(const SaddleMatrix& m, const Preconditioner& pc, std::span<const double> b, double tol,
                  int maxit) {
  const int n = m.size();
  if (static_cast<int>(b.size()) != n) throw DimensionError("gmres: right-hand side size mismatch");
  if (!(tol > 0.0)) throw ArgumentError("gmres: tolerance must be positive");
  if (maxit < 1) throw ArgumentError("gmres: maxit must be positive");
  GmresResult out;
  out.x.assign(n, 0.0);
  SolveReport& rep = out.report;
  const double beta = norm2(b);
  rep.history.push_back(1.0);
  if (beta == 0.0) {
    rep.converged = true;
    return out;
  }

  std::vector<Vector> basis;
  basis.emplace_back(b.begin(), b.end());
  for (double& v : basis[0]) v /= beta;
  std::vector<Vector> hess;  // column j has j + 2 entries
  std::vector<double> cs, sn, g{beta};
  Vector z(n), w(n), r(n);

  // x = M^{-1} V y for the current least-squares solution.
  auto form_solution = [&](int k) {
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= hess[j][i] * y[j];
      y[i] = s / hess[i][i];
    }
    Vector vy(n, 0.0);
    for (int j = 0; j < k; ++j) axpy(y[j], basis[j], vy);
    pc.apply(vy, out.x);
    m.residual(b, out.x, r);
    return norm2(r) / beta;
  };

  for (int j = 0; j < maxit; ++j) {
    pc.apply(basis[j], z);
    m.apply(z, w);
    const double wnorm = norm2(w);
    Vector h(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      h[i] = dot(w, basis[i]);
      axpy(-h[i], basis[i], w);
    }
    h[j + 1] = norm2(w);
    if (!std::isfinite(h[j + 1]) || !std::isfinite(wnorm))
      throw SolverError(std::string("gmres: non-finite value in Arnoldi process with preconditioner ") +
                        pc_name(pc.kind()));
    const double hnext = h[j + 1];
    const bool breakdown = hnext <= 1e-14 * wnorm;
    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double rho = std::hypot(h[j], h[j + 1]);
    if (rho == 0.0)
      throw SolverError(std::string("gmres: singular Hessenberg matrix with preconditioner ") + pc_name(pc.kind()));
    cs.push_back(h[j] / rho);
    sn.push_back(h[j + 1] / rho);
    h[j] = rho;
    h[j + 1] = 0.0;
    g.push_back(-sn[j] * g[j]);
    g[j] = cs[j] * g[j];
    hess.push_back(std::move(h));
    const double estimate = std::abs(g[j + 1]) / beta;
    rep.history.push_back(estimate);
    rep.iterations = j + 1;

    if (estimate <= tol || breakdown) {
      rep.true_residual = form_solution(j + 1);
      rep.converged = rep.true_residual <= tol;
      if (rep.converged || breakdown) return out;
    }
    if (j + 1 == maxit) break;
    basis.emplace_back(w);
    for (double& v : basis.back()) v /= hnext;
  }
  rep.true_residual = form_solution(rep.iterations);
  return out;
}

}  // namespace saddlemg
