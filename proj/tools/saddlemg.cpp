// Benchmark driver: runs cases, convergence studies and system dumps.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "saddlemg/bench.hpp"
#include "saddlemg/error.hpp"
#include "saddlemg/matrix_market.hpp"

using namespace saddlemg;

namespace {

struct CaseArgs {
  int example = 1;
  int dim = 2;
  std::string mesh = "uniform";
  int level = 4;
  int max_level = -1;
  std::string pc = "spamg-vanka1";
  double tol = 1e-6;
  int maxit = 1000;
  double contrast = 0.999;
  double inner = 0.125;
  double outer = 0.25;
  bool no_timing = false;
};

void add_case_options(CLI::App* app, CaseArgs& a, bool with_solver) {
  app->add_option("--example", a.example, "Example number")->check(CLI::Range(1, 4));
  app->add_option("--dim", a.dim, "Spatial dimension")->check(CLI::IsMember({2, 3}));
  app->add_option("--mesh", a.mesh, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
  app->add_option("--level", a.level, "Uniform level, or base level of an adaptive mesh");
  app->add_option("--max-level", a.max_level, "Finest adaptive level (default level + 3)");
  app->add_option("--contrast", a.contrast, "Example 4 contrast c");
  app->add_option("--inner", a.inner, "Example 4 inner radius a");
  app->add_option("--outer", a.outer, "Example 4 outer radius b");
  if (!with_solver) return;
  app->add_option("--pc", a.pc, "none, diag, schur, spamg-uzawa, spamg-vanka1, spamg-vankas")
      ->check(CLI::IsMember({"none", "diag", "schur", "spamg-uzawa", "spamg-vanka1", "spamg-vankas"}));
  app->add_option("--tol", a.tol, "Relative residual tolerance");
  app->add_option("--maxit", a.maxit, "GMRES iteration limit");
  app->add_flag("--no-timing", a.no_timing, "Write zero timings for reproducible output");
}

CaseSpec to_spec(const CaseArgs& a) {
  CaseSpec s;
  s.example = a.example;
  s.dim = a.dim;
  s.mesh = a.mesh == "adaptive" ? MeshMode::Adaptive : MeshMode::Uniform;
  s.level = a.level;
  s.max_level = a.max_level;
  s.pc = *parse_pc(a.pc);
  s.tol = a.tol;
  s.maxit = a.maxit;
  s.bump.contrast = a.contrast;
  s.bump.inner = a.inner;
  s.bump.outer = a.outer;
  s.timing = !a.no_timing;
  return s;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ArgumentError("cannot open " + path);
  return file;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed Poisson saddle-point benchmarks"};
  app.require_subcommand(1);

  CaseArgs run_args;
  std::string run_out, stats_out, history_out;
  auto* run = app.add_subcommand("run", "Solve one case and print a CSV report row");
  add_case_options(run, run_args, true);
  run->add_option("--out", run_out, "CSV report file (default stdout)");
  run->add_option("--stats", stats_out, "Write preconditioner hierarchy statistics CSV");
  run->add_option("--history", history_out, "Write GMRES residual history CSV");

  CaseArgs conv_args;
  int first = 3, last = 7;
  std::string conv_out;
  auto* conv = app.add_subcommand("converge", "Error table over a level range with fitted slopes");
  add_case_options(conv, conv_args, true);
  conv->add_option("--from", first, "First level")->required();
  conv->add_option("--to", last, "Last level")->required();
  conv->add_option("--out", conv_out, "CSV report file (default stdout)");

  CaseArgs dump_args;
  std::string prefix = "system";
  auto* dump = app.add_subcommand("dump-system", "Write A, B and right-hand sides in MatrixMarket/plain text");
  add_case_options(dump, dump_args, false);
  dump->add_option("--prefix", prefix, "Output file prefix");

  CaseArgs mesh_args;
  std::string mesh_out;
  auto* mesh = app.add_subcommand("dump-mesh", "Write the leaves of a case mesh");
  add_case_options(mesh, mesh_args, false);
  mesh->add_option("--out", mesh_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const CaseSpec spec = to_spec(run_args);
      RunExtras extras;
      const ReportRow row = run_case(spec, &extras);
      std::ofstream file;
      std::ostream& out = open_out(run_out, file);
      write_csv_header(out);
      write_csv_row(out, row);
      if (!stats_out.empty()) write_file(stats_out, extras.hierarchy_stats);
      if (!history_out.empty()) {
        std::ostringstream h;
        h << "iteration,relative_residual\n" << std::setprecision(17);
        for (std::size_t k = 0; k < extras.report.history.size(); ++k) h << k << ',' << extras.report.history[k] << '\n';
        write_file(history_out, h.str());
      }
      if (!row.error.empty()) {
        std::cerr << "error: " << row.error << '\n';
        return 2;
      }
      return row.converged ? 0 : 2;
    }
    if (*conv) {
      const CaseSpec spec = to_spec(conv_args);
      const ConvergenceStudy study = convergence_study(spec, first, last);
      std::ofstream file;
      std::ostream& out = open_out(conv_out, file);
      write_csv_header(out);
      bool ok = true;
      for (const auto& r : study.rows) {
        write_csv_row(out, r);
        ok = ok && r.converged;
      }
      auto show = [](const std::optional<double>& s) {
        char buf[64];
        if (!s) return std::string("N/A");
        std::snprintf(buf, sizeof buf, "%.4f", *s);
        return std::string(buf);
      };
      std::cerr << "slope l2_u " << show(study.slope_l2_u) << "  slope l2_p " << show(study.slope_l2_p) << '\n';
      return ok ? 0 : 2;
    }
    if (*dump) {
      const BuiltCase c = build_case(to_spec(dump_args));
      std::ofstream a(prefix + "_A.mtx"), b(prefix + "_B.mtx"), ru(prefix + "_rhs_u.txt"), rp(prefix + "_rhs_p.txt");
      if (!a || !b || !ru || !rp) throw ArgumentError("cannot write files with prefix " + prefix);
      write_matrix_market(a, c.system.matrix.A);
      write_matrix_market(b, c.system.matrix.B);
      write_vector(ru, c.system.rhs_u);
      write_vector(rp, c.system.rhs_p);
      std::cerr << "n_u " << c.dofs.n_u << "  n_p " << c.dofs.n_p << '\n';
      return 0;
    }
    if (*mesh) {
      const AdaptiveMesh m = build_case_mesh(to_spec(mesh_args));
      std::ofstream file;
      m.write(open_out(mesh_out, file));
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
