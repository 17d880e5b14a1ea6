#include "saddlemg/spamg.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

const char* smoother_name(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::Uzawa: return "uzawa";
    case SmootherKind::VankaOne: return "vanka-one";
    case SmootherKind::VankaScale: return "vanka-scale";
  }
  return "?";
}

double power_iteration_estimate(const CsrMatrix& m, int steps) {
  const int n = m.rows();
  if (n == 0) return 0.0;
  const Vector d = m.diagonal_values();
  Vector s(n);
  for (int i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) throw SetupError("scaled diagonal: nonpositive diagonal entry in row " + std::to_string(i));
    s[i] = 1.0 / std::sqrt(d[i]);
  }
  // Seeded start: the constant vector is orthogonal to the oscillatory top
  // eigenvector of pressure Laplacians on even grids.
  std::mt19937 rng(0x5eed1u);
  Vector x(n);
  for (double& v : x) v = static_cast<double>(rng()) / 4294967296.0 - 0.5;
  const double nx = norm2(x);
  for (double& v : x) v /= nx;
  Vector y(n), t(n);
  auto apply = [&](const Vector& in, Vector& out) {
    for (int i = 0; i < n; ++i) t[i] = s[i] * in[i];
    spmv_into(m, t, out);
    for (int i = 0; i < n; ++i) out[i] *= s[i];
  };
  for (int k = 0; k < steps; ++k) {
    apply(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  apply(x, y);
  return dot(x, y);
}

ScaledDiagonal scaled_diag_spd(const CsrMatrix& m, double safety, int steps) {
  ScaledDiagonal out;
  out.lambda_max = power_iteration_estimate(m, steps);
  out.sigma = safety * out.lambda_max;
  out.values = m.diagonal_values();
  for (double& v : out.values) v *= out.sigma;
  return out;
}

CsrMatrix schur_surrogate(const SaddleMatrix& m, std::span<const double> a_hat) {
  Vector inv(a_hat.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / a_hat[i];
  CsrMatrix z = multiply(scale_columns(m.B, inv), m.Bt);
  if (m.C.nnz() > 0) z = add(z, m.C);
  return add(z, transpose(z), 0.5, 0.5);
}

BlockInterpolation build_block_interpolation(const SaddleMatrix& m, std::span<const double> a_hat,
                                             const AmgOptions& options) {
  BlockInterpolation bi;
  bi.Z = schur_surrogate(m, a_hat);
  const StrengthGraph su = strength_connections(m.A, options.theta);
  bi.split_u = rs_coarsen(su);
  bi.Pu = build_interpolation(m.A, su, bi.split_u, options.truncation);
  const StrengthGraph sp = strength_connections(bi.Z, options.theta);
  bi.split_p = rs_coarsen(sp);
  bi.Pp = build_interpolation(bi.Z, sp, bi.split_p, options.truncation);
  return bi;
}

CsrMatrix StabilizedProlongation::assemble() const {
  const int nu = Pu.rows();
  const int nuc = Pu.cols();
  std::vector<Triplet> t;
  t.reserve(Pu.nnz() + K.nnz() + Pp.nnz());
  for (int i = 0; i < nu; ++i) {
    auto c = Pu.row_cols(i);
    auto v = Pu.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) t.push_back({i, c[k], v[k]});
    auto kc = K.row_cols(i);
    auto kv = K.row_values(i);
    for (std::size_t k = 0; k < kc.size(); ++k) t.push_back({i, nuc + kc[k], kv[k]});
  }
  for (int j = 0; j < Pp.rows(); ++j) {
    auto c = Pp.row_cols(j);
    auto v = Pp.row_values(j);
    for (std::size_t k = 0; k < c.size(); ++k) t.push_back({nu + j, nuc + c[k], v[k]});
  }
  return CsrMatrix::from_triplets(fine_size(), coarse_size(), t);
}

StabilizedProlongation stabilized_prolongation(const CsrMatrix& pu, const CsrMatrix& pp, const CfSplit& split_u,
                                               std::span<const double> a_hat, const CsrMatrix& b) {
  const int nu = pu.rows();
  if (b.cols() != nu || b.rows() != pp.rows() || split_u.size() != nu || static_cast<int>(a_hat.size()) != nu)
    throw DimensionError("stabilized_prolongation: size mismatch");
  const CsrMatrix bt = transpose(b);
  std::vector<Triplet> t;
  for (int i = 0; i < nu; ++i) {
    if (split_u.coarse[i]) continue;
    auto c = bt.row_cols(i);
    auto v = bt.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) t.push_back({i, c[k], -v[k] / a_hat[i]});
  }
  const CsrMatrix m = CsrMatrix::from_triplets(nu, b.rows(), t);
  return {pu, multiply(m, pp), pp};
}

SaddleMatrix coarse_saddle(const SaddleMatrix& m, const StabilizedProlongation& p) {
  if (p.fine_size() != m.size() || p.Pu.rows() != m.n_u()) throw DimensionError("coarse_saddle: size mismatch");
  const CsrMatrix coarse = galerkin_product(p.assemble(), m.assemble());
  const int nuc = p.Pu.cols();
  const int npc = p.Pp.cols();
  std::vector<Triplet> ta, tb, tc;
  for (int i = 0; i < coarse.rows(); ++i) {
    auto c = coarse.row_cols(i);
    auto v = coarse.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (i < nuc) {
        if (c[k] < nuc) ta.push_back({i, c[k], v[k]});
      } else if (c[k] < nuc) {
        tb.push_back({i - nuc, c[k], v[k]});
      } else {
        tc.push_back({i - nuc, c[k] - nuc, -v[k]});
      }
    }
  }
  return SaddleMatrix(CsrMatrix::from_triplets(nuc, nuc, ta), CsrMatrix::from_triplets(npc, nuc, tb),
                      CsrMatrix::from_triplets(npc, npc, tc));
}

std::vector<VankaPatch> build_vanka_patches(const SaddleMatrix& m, std::span<const double> a_hat,
                                            std::span<const double> s_hat, bool scaled) {
  std::vector<VankaPatch> patches(m.n_p());
  for (int j = 0; j < m.n_p(); ++j) {
    VankaPatch& patch = patches[j];
    patch.row = j;
    auto cols = m.B.row_cols(j);
    auto vals = m.B.row_values(j);
    const int n = static_cast<int>(cols.size());
    patch.flux.assign(cols.begin(), cols.end());
    patch.weight.resize(n);
    DenseMatrix local(n + 1, n + 1);
    double schur = 0.0;
    for (int k = 0; k < n; ++k) {
      const int i = cols[k];
      const double v = scaled ? 1.0 / std::sqrt(static_cast<double>(m.Bt.row_cols(i).size())) : 1.0;
      patch.weight[k] = v;
      const double bj = vals[k] / v;
      local(k, k) = a_hat[i];
      local(k, n) = bj;
      local(n, k) = bj;
      schur += bj * bj / a_hat[i];
    }
    local(n, n) = schur - s_hat[j];
    try {
      patch.lu = DenseLU(std::move(local));
    } catch (const SingularMatrixError& e) {
      throw SetupError("Vanka patch " + std::to_string(j) + " is singular: " + e.what());
    }
  }
  return patches;
}

namespace {

Vector inverse(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / v[i];
  return out;
}

void prepare_with_surrogate(SpamgLevel& level, SmootherKind kind, double safety, int steps, const CsrMatrix& z) {
  level.s_hat = scaled_diag_spd(z, safety, steps);
  level.inv_s_hat = inverse(level.s_hat.values);
  if (kind != SmootherKind::Uzawa)
    level.patches = build_vanka_patches(level.matrix, level.a_hat.values, level.s_hat.values,
                                        kind == SmootherKind::VankaScale);
}

// Cholesky of C + shift I; failure means an eigenvalue below -shift.
bool shifted_cholesky_ok(const CsrMatrix& c, double shift) {
  DenseMatrix d = to_dense(c);
  const int n = d.rows();
  for (int j = 0; j < n; ++j) {
    double s = d(j, j) + shift;
    for (int k = 0; k < j; ++k) s -= d(j, k) * d(j, k);
    if (!(s > 0.0)) return false;
    const double l = std::sqrt(s);
    d(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double t = d(i, j);
      for (int k = 0; k < j; ++k) t -= d(i, k) * d(j, k);
      d(i, j) = t / l;
    }
  }
  return true;
}

void check_coarse_c(const CsrMatrix& c, int level, int dense_limit) {
  double norm_inf = 0.0;
  for (int i = 0; i < c.rows(); ++i) {
    double s = 0.0;
    for (double v : c.row_values(i)) s += std::abs(v);
    norm_inf = std::max(norm_inf, s);
  }
  const double tol = 1e-10 * norm_inf;
  const Vector diag = c.diagonal_values();
  for (double v : diag)
    if (v < -tol) throw SetupError("spamg_setup: coarse C block at level " + std::to_string(level) + " is indefinite");
  if (c.rows() <= dense_limit && c.rows() > 0 && !shifted_cholesky_ok(c, tol))
    throw SetupError("spamg_setup: coarse C block at level " + std::to_string(level) + " is indefinite");
}

}  // namespace

void prepare_smoother(SpamgLevel& level, SmootherKind kind, double safety, int steps) {
  level.a_hat = scaled_diag_spd(level.matrix.A, safety, steps);
  level.inv_a_hat = inverse(level.a_hat.values);
  prepare_with_surrogate(level, kind, safety, steps, schur_surrogate(level.matrix, level.a_hat.values));
}

void uzawa_sweep(const SpamgLevel& level, std::span<double> x, std::span<const double> rhs) {
  const SaddleMatrix& m = level.matrix;
  const int nu = m.n_u();
  const int np = m.n_p();
  auto u = x.first(nu);
  auto p = x.subspan(nu);
  auto v = rhs.first(nu);
  auto q = rhs.subspan(nu);
  // t = v - A u is shared by the predictor and the corrector.
  Vector t(nu), ustar(nu), w(np), pnew(np);
  spmv_into(m.A, u, t);
  for (int i = 0; i < nu; ++i) t[i] = v[i] - t[i];
  Vector btp = spmv(m.Bt, p);
  for (int i = 0; i < nu; ++i) ustar[i] = u[i] + level.inv_a_hat[i] * (t[i] - btp[i]);
  spmv_into(m.B, ustar, w);
  if (m.C.nnz() > 0) spmv_into(m.C, p, w, -1.0, 1.0);
  for (int j = 0; j < np; ++j) pnew[j] = p[j] + level.inv_s_hat[j] * (w[j] - q[j]);
  spmv_into(m.Bt, pnew, btp);
  for (int i = 0; i < nu; ++i) u[i] += level.inv_a_hat[i] * (t[i] - btp[i]);
  for (int j = 0; j < np; ++j) p[j] = pnew[j];
}

namespace {

double row_dot(const CsrMatrix& m, int i, std::span<const double> x) {
  auto c = m.row_cols(i);
  auto v = m.row_values(i);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * x[c[k]];
  return s;
}

void solve_patch(const VankaPatch& patch, std::span<const double> ru, double rp, Vector& local) {
  const int n = static_cast<int>(patch.flux.size());
  local.resize(n + 1);
  for (int k = 0; k < n; ++k) local[k] = patch.weight[k] * ru[k];
  local[n] = rp;
  patch.lu.solve_in_place(local);
}

}  // namespace

void vanka_sweep(const SpamgLevel& level, VankaMode mode, std::span<double> x, std::span<const double> rhs) {
  const SaddleMatrix& m = level.matrix;
  const int nu = m.n_u();
  const int np = m.n_p();
  if (static_cast<int>(level.patches.size()) != np) throw SetupError("vanka_sweep: patches not built");
  auto u = x.first(nu);
  auto p = x.subspan(nu);
  Vector local, ru;
  if (mode == VankaMode::Additive) {
    Vector r(m.size());
    m.residual(rhs, x, r);
    Vector delta(m.size(), 0.0);
    for (const VankaPatch& patch : level.patches) {
      ru.resize(patch.flux.size());
      for (std::size_t k = 0; k < ru.size(); ++k) ru[k] = r[patch.flux[k]];
      solve_patch(patch, ru, r[nu + patch.row], local);
      for (std::size_t k = 0; k < ru.size(); ++k) delta[patch.flux[k]] += patch.weight[k] * local[k];
      delta[nu + patch.row] += local[ru.size()];
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += delta[i];
    return;
  }
  auto v = rhs.first(nu);
  auto q = rhs.subspan(nu);
  auto visit = [&](const VankaPatch& patch) {
    const int j = patch.row;
    ru.resize(patch.flux.size());
    for (std::size_t k = 0; k < ru.size(); ++k) {
      const int i = patch.flux[k];
      ru[k] = v[i] - row_dot(m.A, i, u) - row_dot(m.Bt, i, p);
    }
    double rp = q[j] - row_dot(m.B, j, u);
    if (m.C.nnz() > 0) rp += row_dot(m.C, j, p);
    solve_patch(patch, ru, rp, local);
    for (std::size_t k = 0; k < ru.size(); ++k) u[patch.flux[k]] += patch.weight[k] * local[k];
    p[j] += local[ru.size()];
  };
  if (mode == VankaMode::Forward) {
    for (int j = 0; j < np; ++j) visit(level.patches[j]);
  } else {
    for (int j = np - 1; j >= 0; --j) visit(level.patches[j]);
  }
}

void SpamgHierarchy::smooth(int l, std::span<double> x, std::span<const double> rhs, bool pre) const {
  const SpamgLevel& lv = levels[l];
  if (options.smoother == SmootherKind::Uzawa) {
    uzawa_sweep(lv, x, rhs);
  } else if (pre) {
    vanka_sweep(lv, VankaMode::Forward, x, rhs);
    vanka_sweep(lv, VankaMode::Reverse, x, rhs);
  } else {
    vanka_sweep(lv, VankaMode::Reverse, x, rhs);
    vanka_sweep(lv, VankaMode::Forward, x, rhs);
  }
}

SpamgHierarchy spamg_setup(const SaddleMatrix& top, const SpamgOptions& options) {
  SpamgHierarchy h;
  h.options = options;
  SaddleMatrix current = top;
  int stalled = 0;
  for (;;) {
    const int l = h.num_levels();
    SpamgLevel lv;
    const int n = current.size();
    if (n <= options.coarse_size) {
      try {
        h.coarse_lu = DenseLU(to_dense(current.assemble()));
      } catch (const SingularMatrixError& e) {
        throw SetupError("spamg_setup: coarse saddle matrix at level " + std::to_string(l) + " is singular: " +
                         e.what());
      }
      lv.matrix = std::move(current);
      h.levels.push_back(std::move(lv));
      break;
    }
    if (l + 1 >= options.max_levels)
      throw SetupError("spamg_setup: level limit reached with " + std::to_string(n) + " unknowns left");

    lv.matrix = std::move(current);
    lv.a_hat = scaled_diag_spd(lv.matrix.A, options.safety, options.power_steps);
    lv.inv_a_hat = inverse(lv.a_hat.values);
    BlockInterpolation bi = build_block_interpolation(lv.matrix, lv.a_hat.values, options.amg);
    const int nc = bi.split_u.n_coarse + bi.split_p.n_coarse;
    if (bi.split_p.n_coarse == 0)
      throw SetupError("spamg_setup: pressure coarsening produced no coarse points at level " + std::to_string(l));
    const double fraction = static_cast<double>(nc) / n;
    stalled = fraction > 0.95 ? stalled + 1 : 0;
    if (stalled >= 2)
      throw SetupError("spamg_setup: coarsening stalled at level " + std::to_string(l) + " (coarse fraction " +
                       std::to_string(fraction) + ")");
    prepare_with_surrogate(lv, options.smoother, options.safety, options.power_steps, bi.Z);
    lv.prolongation = stabilized_prolongation(bi.Pu, bi.Pp, bi.split_u, lv.a_hat.values, lv.matrix.B);
    lv.split_u = std::move(bi.split_u);
    lv.split_p = std::move(bi.split_p);
    lv.P = lv.prolongation.assemble();
    lv.R = transpose(lv.P);
    current = coarse_saddle(lv.matrix, lv.prolongation);
    check_coarse_c(current.C, l + 1, options.psd_check_size);
    h.levels.push_back(std::move(lv));
  }
  return h;
}

namespace {

std::size_t saddle_nnz(const SaddleMatrix& m) { return m.A.nnz() + 2 * m.B.nnz() + m.C.nnz(); }

void vcycle_level(const SpamgHierarchy& h, int l, std::span<const double> rhs, std::span<double> x) {
  const SpamgLevel& lv = h.levels[l];
  const int n = lv.matrix.size();
  Vector r(n);
  if (l + 1 == h.num_levels()) {
    lv.matrix.residual(rhs, x, r);
    h.coarse_lu.solve_in_place(r);
    for (int i = 0; i < n; ++i) x[i] += r[i];
    return;
  }
  h.smooth(l, x, rhs, true);
  lv.matrix.residual(rhs, x, r);
  Vector rc = spmv(lv.R, r);
  Vector xc(rc.size(), 0.0);
  vcycle_level(h, l + 1, rc, xc);
  spmv_into(lv.P, xc, x, 1.0, 1.0);
  h.smooth(l, x, rhs, false);
}

}  // namespace

double SpamgHierarchy::operator_complexity() const {
  if (levels.empty()) return 0.0;
  double total = 0.0;
  for (const auto& lv : levels) total += static_cast<double>(saddle_nnz(lv.matrix));
  return total / static_cast<double>(std::max<std::size_t>(1, saddle_nnz(levels[0].matrix)));
}

void SpamgHierarchy::write_stats(std::ostream& out) const {
  out << "level,n_u,n_p,nnz_A,nnz_B,nnz_C,operator_complexity,smoother\n";
  const double fine = levels.empty() ? 1.0 : static_cast<double>(std::max<std::size_t>(1, saddle_nnz(levels[0].matrix)));
  double total = 0.0;
  for (int l = 0; l < num_levels(); ++l) {
    const SaddleMatrix& m = levels[l].matrix;
    total += static_cast<double>(saddle_nnz(m));
    out << l << ',' << m.n_u() << ',' << m.n_p() << ',' << m.A.nnz() << ',' << m.B.nnz() << ',' << m.C.nnz() << ','
        << std::setprecision(17) << total / fine << ','
        << (l + 1 == num_levels() ? "direct" : smoother_name(options.smoother)) << '\n';
  }
}

void spamg_vcycle(const SpamgHierarchy& h, std::span<const double> rhs, std::span<double> x) {
  if (h.levels.empty()) throw SetupError("spamg_vcycle: empty hierarchy");
  const int n = h.levels[0].matrix.size();
  if (static_cast<int>(rhs.size()) != n || static_cast<int>(x.size()) != n)
    throw DimensionError("spamg_vcycle: size mismatch");
  vcycle_level(h, 0, rhs, x);
}

}  // namespace saddlemg
