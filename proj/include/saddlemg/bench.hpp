#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saddlemg/discretize.hpp"
#include "saddlemg/krylov.hpp"
#include "saddlemg/mesh.hpp"
#include "saddlemg/problem.hpp"

namespace saddlemg {

enum class MeshMode { Uniform, Adaptive };

const char* mesh_mode_name(MeshMode mode);

struct CaseSpec {
  int example = 1;
  int dim = 2;
  MeshMode mesh = MeshMode::Uniform;
  int level = 4;
  /// Finest level of adaptive meshes; -1 means level + 3.
  int max_level = -1;
  PcKind pc = PcKind::SpamgVankaOne;
  double tol = 1e-6;
  int maxit = 1000;
  BumpParams bump;
  /// When false the timing columns are written as zero so that repeated
  /// runs produce byte-identical CSV.
  bool timing = true;

  int finest_level() const;
};

/// Throws ArgumentError for unsupported combinations before any work.
void validate(const CaseSpec& spec);

/// Uniform mesh at `level`, or the adaptive mesh of the example: a ball
/// around the domain center refined to a fixed point for examples 1-3, the
/// ring a < |x - x0| < b refined to the finest level for example 4.
AdaptiveMesh build_case_mesh(const CaseSpec& spec);

struct BuiltCase {
  AdaptiveMesh mesh;
  DofMap dofs;
  ManufacturedProblem problem;
  SaddleSystem system;
};

BuiltCase build_case(const CaseSpec& spec);

struct ReportRow {
  int example = 0;
  int dim = 0;
  MeshMode mesh = MeshMode::Uniform;
  int level = 0;
  int max_level = 0;
  PcKind pc = PcKind::None;
  int n_u = 0;
  int n_p = 0;
  int iterations = 0;
  bool converged = false;
  double l2_u = 0.0;
  double l2_p = 0.0;
  double h1broken_u = 0.0;
  double setup_s = 0.0;
  double solve_s = 0.0;
  /// Setup or solver failure message; empty on success.
  std::string error;
};

/// Optional by-products of run_case.
struct RunExtras {
  SolveReport report;
  Vector solution;
  /// Hierarchy statistics CSV of the preconditioner (empty for none/diag).
  std::string hierarchy_stats;
  /// max_e |(B u_h - rhs_p)_e| / ||rhs||
  double conservation = 0.0;
};

/// Assemble, set up the preconditioner, solve and evaluate errors. Setup
/// and solver failures are recorded in the row, not thrown.
ReportRow run_case(const CaseSpec& spec, RunExtras* extras = nullptr);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ReportRow& row);

struct ConvergenceStudy {
  std::vector<ReportRow> rows;
  /// Least-squares slope of -log2(error) against level; empty when any
  /// error is zero.
  std::optional<double> slope_l2_u;
  std::optional<double> slope_l2_p;
};

std::optional<double> fit_slope(const std::vector<int>& levels, const std::vector<double>& errors);

/// Runs `base` for level = first..last (adaptive meshes keep their offset
/// between level and finest level).
ConvergenceStudy convergence_study(const CaseSpec& base, int first, int last);

}  // namespace saddlemg
