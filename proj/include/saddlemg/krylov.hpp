#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saddlemg/amg.hpp"
#include "saddlemg/saddle.hpp"
#include "saddlemg/spamg.hpp"

namespace saddlemg {

enum class PcKind { None, Diag, Schur, SpamgUzawa, SpamgVankaOne, SpamgVankaScale };

/// CLI spelling: none, diag, schur, spamg-uzawa, spamg-vanka1, spamg-vankas.
const char* pc_name(PcKind kind);
std::optional<PcKind> parse_pc(const std::string& name);

/// Fixed linear operator approximating the inverse of a saddle matrix.
class Preconditioner {
public:
  virtual ~Preconditioner() = default;
  virtual PcKind kind() const = 0;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

struct PreconditionerOptions {
  AmgOptions amg;
  SpamgOptions spamg;
};

std::unique_ptr<Preconditioner> make_preconditioner(PcKind kind, const SaddleMatrix& m,
                                                    const PreconditionerOptions& options = {});

/// z_u = lumped(A)^{-1} r_u, z_p = -diag(B lumped(A)^{-1} B^T)^{-1} r_p.
class DiagPreconditioner : public Preconditioner {
public:
  explicit DiagPreconditioner(const SaddleMatrix& m);
  PcKind kind() const override { return PcKind::Diag; }
  void apply(std::span<const double> r, std::span<double> z) const override;

private:
  Vector inv_lumped_;
  Vector inv_schur_diag_;
};

/// z_u = lumped(A)^{-1} r_u, z_p = -(one AMG V-cycle on B diag(A)^{-1} B^T) r_p.
class SchurPreconditioner : public Preconditioner {
public:
  SchurPreconditioner(const SaddleMatrix& m, const AmgOptions& options);
  PcKind kind() const override { return PcKind::Schur; }
  void apply(std::span<const double> r, std::span<double> z) const override;
  const AmgHierarchy& hierarchy() const { return amg_; }
  const CsrMatrix& schur_matrix() const { return schur_; }

private:
  Vector inv_lumped_;
  CsrMatrix schur_;
  AmgHierarchy amg_;
};

/// One SPAMG V-cycle from a zero initial guess.
class SpamgPreconditioner : public Preconditioner {
public:
  SpamgPreconditioner(const SaddleMatrix& m, const SpamgOptions& options);
  PcKind kind() const override;
  void apply(std::span<const double> r, std::span<double> z) const override;
  const SpamgHierarchy& hierarchy() const { return h_; }

private:
  SpamgHierarchy h_;
};

class IdentityPreconditioner : public Preconditioner {
public:
  PcKind kind() const override { return PcKind::None; }
  void apply(std::span<const double> r, std::span<double> z) const override;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// Relative residual estimate, starting with 1 at iteration 0.
  std::vector<double> history;
  /// Final true relative residual ||b - Mx|| / ||b||.
  double true_residual = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct GmresResult {
  SolveReport report;
  Vector x;
};

/// Right-preconditioned GMRES without restart, modified Gram-Schmidt, zero
/// initial guess. Stops once the true relative residual reaches tol.
GmresResult gmres(const SaddleMatrix& m, const Preconditioner& pc, std::span<const double> b, double tol = 1e-6,
                  int maxit = 1000);

}  // namespace saddlemg
