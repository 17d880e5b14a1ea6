#include "saddlemg/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "saddlemg/error.hpp"

namespace saddlemg {

const char* mesh_mode_name(MeshMode mode) { return mode == MeshMode::Uniform ? "uniform" : "adaptive"; }

int CaseSpec::finest_level() const {
  if (mesh == MeshMode::Uniform) return level;
  return max_level < 0 ? level + 3 : max_level;
}

void validate(const CaseSpec& spec) {
  if (spec.example < 1 || spec.example > 4) throw ArgumentError("unknown example " + std::to_string(spec.example));
  if (spec.dim != 2 && spec.dim != 3) throw ArgumentError("dimension must be 2 or 3");
  if (spec.level < 0 || spec.finest_level() > kMaxMeshLevel)
    throw ArgumentError("levels must lie in [0, " + std::to_string(kMaxMeshLevel) + "]");
  if (spec.mesh == MeshMode::Adaptive && spec.finest_level() < spec.level)
    throw ArgumentError("max level must not be below the base level");
  if (!(spec.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (spec.maxit < 1) throw ArgumentError("maxit must be positive");
}

AdaptiveMesh build_case_mesh(const CaseSpec& spec) {
  validate(spec);
  AdaptiveMesh mesh = build_uniform(spec.dim, spec.level);
  if (spec.mesh == MeshMode::Uniform) return mesh;
  const int finest = spec.finest_level();
  if (spec.example == 4) {
    RingOverlapCriterion ring;
    ring.center = spec.bump.center;
    ring.inner = spec.bump.inner;
    ring.outer = spec.bump.outer;
    ring.target_level = finest;
    return refine(mesh, ring);
  }
  BallCriterion ball;
  ball.center = {0.5, 0.5, 0.5};
  ball.base_level = spec.level;
  ball.max_level = finest;
  for (;;) {
    AdaptiveMesh next = refine(mesh, ball);
    if (next == mesh) return mesh;
    mesh = std::move(next);
  }
}

BuiltCase build_case(const CaseSpec& spec) {
  AdaptiveMesh mesh = build_case_mesh(spec);
  ManufacturedProblem problem = make_example(spec.example, spec.dim, spec.bump);
  DofMap dofs = enumerate_dofs(mesh, problem.boundary);
  SaddleSystem system = assemble_system(mesh, dofs, problem);
  return {std::move(mesh), std::move(dofs), std::move(problem), std::move(system)};
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ReportRow run_case(const CaseSpec& spec, RunExtras* extras) {
  validate(spec);
  ReportRow row;
  row.example = spec.example;
  row.dim = spec.dim;
  row.mesh = spec.mesh;
  row.level = spec.level;
  row.max_level = spec.finest_level();
  row.pc = spec.pc;

  const BuiltCase c = build_case(spec);
  row.n_u = c.dofs.n_u;
  row.n_p = c.dofs.n_p;
  const Vector rhs = c.system.rhs();

  std::unique_ptr<Preconditioner> pc;
  auto t0 = std::chrono::steady_clock::now();
  try {
    pc = make_preconditioner(spec.pc, c.system.matrix);
  } catch (const Error& e) {
    row.error = e.what();
    return row;
  }
  const double setup = seconds_since(t0);

  GmresResult result;
  t0 = std::chrono::steady_clock::now();
  try {
    result = gmres(c.system.matrix, *pc, rhs, spec.tol, spec.maxit);
  } catch (const Error& e) {
    row.error = e.what();
    return row;
  }
  const double solve = seconds_since(t0);
  if (spec.timing) {
    row.setup_s = setup;
    row.solve_s = solve;
  }
  row.iterations = result.report.iterations;
  row.converged = result.report.converged;

  std::span<const double> x(result.x);
  const ErrorReport err = evaluate_errors(c.mesh, c.dofs, x.first(row.n_u), x.subspan(row.n_u), c.problem);
  row.l2_u = err.l2_u;
  row.l2_p = err.l2_p;
  row.h1broken_u = err.h1broken_u;

  if (extras) {
    result.report.setup_seconds = row.setup_s;
    result.report.solve_seconds = row.solve_s;
    const Vector bu = spmv(c.system.matrix.B, x.first(row.n_u));
    const double scale = norm2(rhs);
    double worst = 0.0;
    for (int e = 0; e < row.n_p; ++e) worst = std::max(worst, std::abs(bu[e] - c.system.rhs_p[e]));
    extras->conservation = scale > 0.0 ? worst / scale : worst;
    std::ostringstream stats;
    if (const auto* s = dynamic_cast<const SpamgPreconditioner*>(pc.get())) s->hierarchy().write_stats(stats);
    if (const auto* s = dynamic_cast<const SchurPreconditioner*>(pc.get())) s->hierarchy().write_stats(stats);
    extras->hierarchy_stats = stats.str();
    extras->report = std::move(result.report);
    extras->solution = std::move(result.x);
  }
  return row;
}

void write_csv_header(std::ostream& out) {
  out << "example,dim,mesh,level,max_level,pc,n_u,n_p,iterations,converged,l2_u,l2_p,h1broken_u,setup_s,solve_s\n";
}

void write_csv_row(std::ostream& out, const ReportRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%d,%s,%d,%d,%s,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.example, r.dim,
                mesh_mode_name(r.mesh), r.level, r.max_level, pc_name(r.pc), r.n_u, r.n_p, r.iterations,
                r.converged ? 1 : 0, r.l2_u, r.l2_p, r.h1broken_u, r.setup_s, r.solve_s);
  out << buf;
}

std::optional<double> fit_slope(const std::vector<int>& levels, const std::vector<double>& errors) {
  if (levels.size() != errors.size() || levels.size() < 2) return std::nullopt;
  const double n = static_cast<double>(levels.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(errors[k] > 0.0) || !std::isfinite(errors[k])) return std::nullopt;
    const double x = levels[k];
    const double y = -std::log2(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

ConvergenceStudy convergence_study(const CaseSpec& base, int first, int last) {
  if (last - first < 2) throw ArgumentError("a convergence study needs at least three levels");
  ConvergenceStudy study;
  std::vector<int> levels;
  std::vector<double> eu, ep;
  const int offset = base.finest_level() - base.level;
  for (int l = first; l <= last; ++l) {
    CaseSpec spec = base;
    spec.level = l;
    if (spec.mesh == MeshMode::Adaptive) spec.max_level = l + offset;
    study.rows.push_back(run_case(spec));
    levels.push_back(l);
    eu.push_back(study.rows.back().l2_u);
    ep.push_back(study.rows.back().l2_p);
  }
  study.slope_l2_u = fit_slope(levels, eu);
  study.slope_l2_p = fit_slope(levels, ep);
  return study;
}

}  // namespace saddlemg
