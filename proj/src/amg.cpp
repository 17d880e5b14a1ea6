#include "saddlemg/amg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

StrengthGraph strength_connections(const CsrMatrix& m, double theta) {
  if (m.rows() != m.cols()) throw DimensionError("strength_connections: matrix not square");
  StrengthGraph s;
  s.theta = theta;
  s.ptr.assign(static_cast<std::size_t>(m.rows()) + 1, 0);
  for (int i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    double max_neg = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] != i) max_neg = std::max(max_neg, -vals[k]);
    if (max_neg > 0.0) {
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k] != i && -vals[k] >= theta * max_neg) s.idx.push_back(cols[k]);
    }
    s.ptr[i + 1] = static_cast<int>(s.idx.size());
  }
  return s;
}

namespace {

enum : char { kUndecided = 0, kCoarse = 1, kFine = 2 };

StrengthGraph transpose_graph(const StrengthGraph& s) {
  const int n = s.size();
  StrengthGraph t;
  t.theta = s.theta;
  t.ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int j : s.idx) ++t.ptr[j + 1];
  for (int i = 0; i < n; ++i) t.ptr[i + 1] += t.ptr[i];
  t.idx.resize(s.idx.size());
  std::vector<int> next(t.ptr.begin(), t.ptr.end() - 1);
  for (int i = 0; i < n; ++i)
    for (int j : s.row(i)) t.idx[next[j]++] = i;
  return t;
}

}  // namespace

CfSplit rs_coarsen(const StrengthGraph& s) {
  const int n = s.size();
  const StrengthGraph st = transpose_graph(s);
  std::vector<char> state(n, kUndecided);
  std::vector<int> measure(n);
  std::set<std::pair<int, int>> queue;  // (-measure, index)
  for (int i = 0; i < n; ++i) {
    measure[i] = static_cast<int>(st.row(i).size());
    if (s.row(i).empty() && st.row(i).empty())
      state[i] = kFine;
    else
      queue.insert({-measure[i], i});
  }
  auto bump = [&](int k, int delta) {
    queue.erase({-measure[k], k});
    measure[k] += delta;
    queue.insert({-measure[k], k});
  };
  while (!queue.empty()) {
    const int i = queue.begin()->second;
    queue.erase(queue.begin());
    if (measure[i] <= 0) {
      state[i] = kFine;
      continue;
    }
    state[i] = kCoarse;
    for (int j : st.row(i)) {
      if (state[j] != kUndecided) continue;
      state[j] = kFine;
      queue.erase({-measure[j], j});
      for (int k : s.row(j))
        if (state[k] == kUndecided) bump(k, 1);
    }
    for (int k : s.row(i))
      if (state[k] == kUndecided) bump(k, -1);
  }

  // Second pass: every strong F-F pair must share a strong C point.
  std::vector<int> c_mark(n, -1);
  for (int i = 0; i < n; ++i) {
    if (state[i] != kFine) continue;
    for (int k : s.row(i))
      if (state[k] == kCoarse) c_mark[k] = i;
    int tentative = -1;
    bool promoted = false;
    for (int j : s.row(i)) {
      if (state[j] != kFine) continue;
      bool shared = false;
      for (int k : s.row(j))
        if (c_mark[k] == i) {
          shared = true;
          break;
        }
      if (shared) continue;
      if (tentative >= 0) {
        state[i] = kCoarse;
        promoted = true;
        break;
      }
      tentative = j;
      c_mark[j] = i;
    }
    if (!promoted && tentative >= 0) state[tentative] = kCoarse;
  }

  CfSplit split;
  split.coarse.resize(n);
  split.coarse_index.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    split.coarse[i] = state[i] == kCoarse;
    if (split.coarse[i]) split.coarse_index[i] = split.n_coarse++;
  }
  return split;
}

CsrMatrix build_interpolation(const CsrMatrix& m, const StrengthGraph& s, const CfSplit& split, double truncation) {
  const int n = m.rows();
  if (s.size() != n || split.size() != n) throw DimensionError("build_interpolation: size mismatch");
  const Vector diag = m.diagonal_values();
  std::vector<int> strong_mark(n, -1);
  std::vector<int> cpos(n, -1);
  std::vector<int> cpos_owner(n, -1);
  std::vector<int> ci;
  std::vector<double> w;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 4);

  for (int i = 0; i < n; ++i) {
    if (split.coarse[i]) {
      t.push_back({i, split.coarse_index[i], 1.0});
      continue;
    }
    if (s.row(i).empty()) continue;
    ci.clear();
    for (int j : s.row(i)) {
      strong_mark[j] = i;
      if (split.coarse[j]) {
        cpos[j] = static_cast<int>(ci.size());
        cpos_owner[j] = i;
        ci.push_back(j);
      }
    }
    if (ci.empty())
      throw SetupError("build_interpolation: F point " + std::to_string(i) + " has no strong C neighbor");
    w.assign(ci.size(), 0.0);
    double a_ii = 0.0;
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      const double a_ij = vals[k];
      if (j == i) {
        a_ii += a_ij;
      } else if (cpos_owner[j] == i) {
        w[cpos[j]] += a_ij;
      } else if (strong_mark[j] == i) {
        // Distribute through the entries of row j that oppose its diagonal.
        auto jc = m.row_cols(j);
        auto jv = m.row_values(j);
        double denom = 0.0;
        for (std::size_t q = 0; q < jc.size(); ++q)
          if (cpos_owner[jc[q]] == i && jv[q] * diag[j] < 0.0) denom += jv[q];
        if (denom == 0.0) {
          a_ii += a_ij;
        } else {
          for (std::size_t q = 0; q < jc.size(); ++q)
            if (cpos_owner[jc[q]] == i && jv[q] * diag[j] < 0.0) w[cpos[jc[q]]] += a_ij * jv[q] / denom;
        }
      } else {
        a_ii += a_ij;
      }
    }
    if (a_ii == 0.0) throw SetupError("build_interpolation: vanishing diagonal in row " + std::to_string(i));
    double wmax = 0.0, before = 0.0;
    for (double& x : w) {
      x = -x / a_ii;
      wmax = std::max(wmax, std::abs(x));
      before += x;
    }
    double after = 0.0;
    for (double x : w)
      if (std::abs(x) >= truncation * wmax) after += x;
    const double scale = after != 0.0 ? before / after : 1.0;
    for (std::size_t k = 0; k < ci.size(); ++k)
      if (std::abs(w[k]) >= truncation * wmax) t.push_back({i, split.coarse_index[ci[k]], w[k] * scale});
  }
  return CsrMatrix::from_triplets(n, split.n_coarse, t);
}

namespace {

Vector inverse_diagonal(const CsrMatrix& m, int level) {
  Vector d = m.diagonal_values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0)
      throw SetupError("amg_setup: zero diagonal at level " + std::to_string(level) + ", row " + std::to_string(i));
    d[i] = 1.0 / d[i];
  }
  return d;
}

}  // namespace

AmgHierarchy amg_setup(const CsrMatrix& m, const AmgOptions& options) {
  if (m.rows() != m.cols()) throw DimensionError("amg_setup: matrix not square");
  const double scale = max_abs(m);
  if (max_asymmetry(m) > 1e-10 * scale) throw SetupError("amg_setup: matrix is not symmetric");
  AmgHierarchy h;
  CsrMatrix current = m;
  int stalled = 0;
  for (;;) {
    const int level = h.num_levels();
    AmgLevel lv;
    lv.inv_diag = inverse_diagonal(current, level);
    const int n = current.rows();
    if (n <= options.coarse_size) {
      h.coarse_lu = DenseLU(to_dense(current));
      h.direct_coarse = true;
      lv.matrix = std::move(current);
      h.levels.push_back(std::move(lv));
      break;
    }
    const StrengthGraph s = strength_connections(current, options.theta);
    CfSplit split = rs_coarsen(s);
    if (split.n_coarse == 0 || level + 1 >= options.max_levels) {
      lv.split = std::move(split);
      lv.matrix = std::move(current);
      h.levels.push_back(std::move(lv));
      break;
    }
    const double fraction = static_cast<double>(split.n_coarse) / n;
    stalled = fraction > 0.95 ? stalled + 1 : 0;
    if (stalled >= 2)
      throw SetupError("amg_setup: coarsening stalled at level " + std::to_string(level) + " (coarse fraction " +
                       std::to_string(fraction) + ")");
    lv.P = build_interpolation(current, s, split, options.truncation);
    lv.R = transpose(lv.P);
    lv.split = std::move(split);
    CsrMatrix coarse = galerkin_product(lv.P, current);
    lv.matrix = std::move(current);
    h.levels.push_back(std::move(lv));
    current = std::move(coarse);
  }
  return h;
}

double AmgHierarchy::operator_complexity() const {
  if (levels.empty() || levels[0].matrix.nnz() == 0) return 0.0;
  double total = 0.0;
  for (const auto& lv : levels) total += static_cast<double>(lv.matrix.nnz());
  return total / static_cast<double>(levels[0].matrix.nnz());
}

void AmgHierarchy::write_stats(std::ostream& out) const {
  out << "level,n,nnz,coarse_fraction,operator_complexity\n";
  double total = 0.0;
  const double fine = levels.empty() ? 1.0 : std::max<double>(1.0, static_cast<double>(levels[0].matrix.nnz()));
  for (int l = 0; l < num_levels(); ++l) {
    const auto& lv = levels[l];
    total += static_cast<double>(lv.matrix.nnz());
    const double fraction =
        lv.P.empty() || lv.matrix.rows() == 0 ? 0.0 : static_cast<double>(lv.P.cols()) / lv.matrix.rows();
    out << l << ',' << lv.matrix.rows() << ',' << lv.matrix.nnz() << ',' << std::setprecision(17) << fraction << ','
        << total / fine << '\n';
  }
}

void gauss_seidel_forward(const CsrMatrix& m, std::span<const double> inv_diag, std::span<const double> b,
                          std::span<double> x) {
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (int i = 0; i < m.rows(); ++i) {
    double r = b[i];
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) r -= val[k] * x[idx[k]];
    x[i] += r * inv_diag[i];
  }
}

void gauss_seidel_backward(const CsrMatrix& m, std::span<const double> inv_diag, std::span<const double> b,
                           std::span<double> x) {
  const auto ptr = m.row_ptr();
  const auto idx = m.col_idx();
  const auto val = m.values();
  for (int i = m.rows() - 1; i >= 0; --i) {
    double r = b[i];
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) r -= val[k] * x[idx[k]];
    x[i] += r * inv_diag[i];
  }
}

namespace {

void vcycle_level(const AmgHierarchy& h, int l, std::span<const double> b, std::span<double> x) {
  const AmgLevel& lv = h.levels[l];
  const int n = lv.matrix.rows();
  if (l + 1 == h.num_levels()) {
    if (h.direct_coarse) {
      Vector r(n);
      spmv_into(lv.matrix, x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      h.coarse_lu.solve_in_place(r);
      for (int i = 0; i < n; ++i) x[i] += r[i];
    } else {
      gauss_seidel_forward(lv.matrix, lv.inv_diag, b, x);
      gauss_seidel_backward(lv.matrix, lv.inv_diag, b, x);
    }
    return;
  }
  gauss_seidel_forward(lv.matrix, lv.inv_diag, b, x);
  Vector r(n);
  spmv_into(lv.matrix, x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  Vector bc = spmv(lv.R, r);
  Vector xc(bc.size(), 0.0);
  vcycle_level(h, l + 1, bc, xc);
  spmv_into(lv.P, xc, x, 1.0, 1.0);
  gauss_seidel_backward(lv.matrix, lv.inv_diag, b, x);
}

}  // namespace

void amg_vcycle(const AmgHierarchy& h, std::span<const double> b, std::span<double> x) {
  if (h.levels.empty()) throw SetupError("amg_vcycle: empty hierarchy");
  const int n = h.levels[0].matrix.rows();
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw DimensionError("amg_vcycle: size mismatch");
  vcycle_level(h, 0, b, x);
}

}  // namespace saddlemg
