#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "saddlemg/dense.hpp"
#include "saddlemg/sparse.hpp"

namespace saddlemg {

/// Row i lists the columns j that strongly influence i:
/// -m_ij >= theta * max_{k != i} (-m_ik). Rows without negative
/// off-diagonals have no strong connections.
struct StrengthGraph {
  double theta = 0.25;
  std::vector<int> ptr{0};
  std::vector<int> idx;

  int size() const { return static_cast<int>(ptr.size()) - 1; }
  std::span<const int> row(int i) const {
    return {idx.data() + ptr[i], static_cast<std::size_t>(ptr[i + 1] - ptr[i])};
  }
};

StrengthGraph strength_connections(const CsrMatrix& m, double theta = 0.25);

struct CfSplit {
  std::vector<char> coarse;
  /// Coarse column of each C point, -1 for F points.
  std::vector<int> coarse_index;
  int n_coarse = 0;

  int size() const { return static_cast<int>(coarse.size()); }
};

/// Classical Ruge-Stueben coarsening: first pass by descending measure
/// (ties to the lowest index), second pass enforcing a common C point for
/// every strongly connected F-F pair.
CfSplit rs_coarsen(const StrengthGraph& s);

/// Modified classical interpolation followed by truncation of weights below
/// `truncation` times the row maximum, rescaled to keep the row sum.
CsrMatrix build_interpolation(const CsrMatrix& m, const StrengthGraph& s, const CfSplit& split,
                              double truncation = 0.05);

struct AmgOptions {
  double theta = 0.25;
  double truncation = 0.05;
  /// Levels with at most this many unknowns are solved directly.
  int coarse_size = 1000;
  int max_levels = 30;
};

struct AmgLevel {
  CsrMatrix matrix;
  Vector inv_diag;
  /// Interpolation to this level from the next one; empty on the coarsest.
  CsrMatrix P;
  CsrMatrix R;
  CfSplit split;
};

class AmgHierarchy {
public:
  std::vector<AmgLevel> levels;
  /// Factorization of the coarsest matrix; unset when that level was too
  /// large for a direct solve and is only smoothed.
  bool direct_coarse = false;
  DenseLU coarse_lu;

  int num_levels() const { return static_cast<int>(levels.size()); }
  double operator_complexity() const;
  /// Per level: level,n,nnz,coarse_fraction,operator_complexity.
  void write_stats(std::ostream& out) const;
};

AmgHierarchy amg_setup(const CsrMatrix& m, const AmgOptions& options = {});

/// One V(1,1) cycle with symmetric Gauss-Seidel smoothing, updating x in place.
void amg_vcycle(const AmgHierarchy& h, std::span<const double> b, std::span<double> x);

void gauss_seidel_forward(const CsrMatrix& m, std::span<const double> inv_diag, std::span<const double> b,
                          std::span<double> x);
void gauss_seidel_backward(const CsrMatrix& m, std::span<const double> inv_diag, std::span<const double> b,
                           std::span<double> x);

}  // namespace saddlemg
