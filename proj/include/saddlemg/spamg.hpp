#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "saddlemg/amg.hpp"
#include "saddlemg/dense.hpp"
#include "saddlemg/saddle.hpp"

namespace saddlemg {

enum class SmootherKind { Uzawa, VankaOne, VankaScale };

const char* smoother_name(SmootherKind kind);

/// sigma * diag(M) with sigma = safety * lambda, lambda the Rayleigh quotient
/// after `steps` power iterations on D^{-1/2} M D^{-1/2} from a fixed-seed
/// pseudo-random start vector.
struct ScaledDiagonal {
  Vector values;
  double sigma = 0.0;
  double lambda_max = 0.0;
};

/// Largest-eigenvalue estimate of D^{-1/2} M D^{-1/2}, D = diag(M).
double power_iteration_estimate(const CsrMatrix& m, int steps = 20);
ScaledDiagonal scaled_diag_spd(const CsrMatrix& m, double safety = 1.1, int steps = 20);

/// B diag(a_hat)^{-1} B^T + C, symmetrized.
CsrMatrix schur_surrogate(const SaddleMatrix& m, std::span<const double> a_hat);

struct BlockInterpolation {
  CsrMatrix Z;
  CfSplit split_u;
  CfSplit split_p;
  CsrMatrix Pu;
  CsrMatrix Pp;
};

/// Classical AMG setup applied separately to A and to the Schur surrogate.
BlockInterpolation build_block_interpolation(const SaddleMatrix& m, std::span<const double> a_hat,
                                             const AmgOptions& options = {});

/// [[Pu, K], [0, Pp]] with K = -diag(a_hat)^{-1} B^T Pp on velocity F rows
/// and zero on velocity C rows.
struct StabilizedProlongation {
  CsrMatrix Pu;
  CsrMatrix K;
  CsrMatrix Pp;

  int fine_size() const { return Pu.rows() + Pp.rows(); }
  int coarse_size() const { return Pu.cols() + Pp.cols(); }
  CsrMatrix assemble() const;
};

StabilizedProlongation stabilized_prolongation(const CsrMatrix& pu, const CsrMatrix& pp, const CfSplit& split_u,
                                               std::span<const double> a_hat, const CsrMatrix& b);

/// Coarse saddle operator P^T M P computed on the monolithic matrices and
/// split back into blocks; C is the negated (2,2) block.
SaddleMatrix coarse_saddle(const SaddleMatrix& m, const StabilizedProlongation& p);

struct VankaPatch {
  int row = 0;
  std::vector<int> flux;
  std::vector<double> weight;
  DenseLU lu;
};

struct SpamgOptions {
  SmootherKind smoother = SmootherKind::VankaOne;
  AmgOptions amg;
  double safety = 1.1;
  int power_steps = 20;
  /// Levels with n_u + n_p at most this are solved directly.
  int coarse_size = 1000;
  int max_levels = 30;
  /// Dense PSD check of each coarse C block up to this size.
  int psd_check_size = 1000;
};

struct SpamgLevel {
  SaddleMatrix matrix;
  ScaledDiagonal a_hat;
  ScaledDiagonal s_hat;
  Vector inv_a_hat;
  Vector inv_s_hat;
  CfSplit split_u;
  CfSplit split_p;
  StabilizedProlongation prolongation;
  CsrMatrix P;
  CsrMatrix R;
  std::vector<VankaPatch> patches;
};

/// Smoothing data for one level (scaled diagonals and, for Vanka, patches).
void prepare_smoother(SpamgLevel& level, SmootherKind kind, double safety = 1.1, int steps = 20);

std::vector<VankaPatch> build_vanka_patches(const SaddleMatrix& m, std::span<const double> a_hat,
                                            std::span<const double> s_hat, bool scaled);

/// One three-step inexact Uzawa update of x = (u, p) for rhs = (v, q).
void uzawa_sweep(const SpamgLevel& level, std::span<double> x, std::span<const double> rhs);

enum class VankaMode { Additive, Forward, Reverse };
void vanka_sweep(const SpamgLevel& level, VankaMode mode, std::span<double> x, std::span<const double> rhs);

class SpamgHierarchy {
public:
  SpamgOptions options;
  std::vector<SpamgLevel> levels;
  DenseLU coarse_lu;

  int num_levels() const { return static_cast<int>(levels.size()); }
  double operator_complexity() const;
  /// Per level: level,n_u,n_p,nnz_A,nnz_B,nnz_C,operator_complexity,smoother.
  void write_stats(std::ostream& out) const;
  /// Pre- or post-smoothing on level l as used inside the V-cycle.
  void smooth(int l, std::span<double> x, std::span<const double> rhs, bool pre) const;
};

SpamgHierarchy spamg_setup(const SaddleMatrix& top, const SpamgOptions& options = {});

/// One V(1,1) cycle updating x in place.
void spamg_vcycle(const SpamgHierarchy& h, std::span<const double> rhs, std::span<double> x);

}  // namespace saddlemg
