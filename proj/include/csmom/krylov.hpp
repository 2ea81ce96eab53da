#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "csmom/linear_operator.hpp"
#include "csmom/rwg.hpp"

namespace csmom {

enum class SolveStatus { converged, max_iterations, stagnated, breakdown };
const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::converged;
  int iterations = 0;
  // Relative residual per iteration; entry 0 is the starting residual. For
  // gmres these are the Arnoldi estimates of the preconditioned residual,
  // non-increasing when no restart is used.
  std::vector<double> residual_history;
  // True relative residual of the returned iterate, recomputed at exit.
  double achieved_residual = 0.0;
  double wall_time_s = 0.0;
  long matvec_count = 0;
  long inner_iterations = 0;        // accumulated inside op.apply, if any
  double mean_inner_per_matvec = 0.0;
  bool success() const { return status == SolveStatus::converged; }
};

// Applies M^{-1} in place; an empty function is the identity.
using Precond = std::function<void(Eigen::VectorXcd&)>;
Precond jacobi_preconditioner(const Eigen::VectorXcd& diag);

struct GmresOptions {
  double tol = 1e-4;          // relative residual target
  int max_iter = 1000;
  int restart = 0;            // 0: full GMRES
  int stagnation_window = 50; // iterations without progress before giving up
  Precond precond;            // left preconditioning
};

struct GmresResult {
  Eigen::VectorXcd x;
  SolveReport report;
};

// Left-preconditioned GMRES with modified Gram-Schmidt orthogonalization.
// Success means the true residual ||b - Ax||/||b|| of the returned iterate
// meets tol; stagnation and iteration exhaustion return the best iterate of
// the current Krylov space together with the report.
GmresResult gmres(const LinearOperator& op, const Eigen::VectorXcd& rhs,
                  const GmresOptions& opt = {});

struct CgOptions {
  double tol = 1e-8;
  int max_iter = 500;
  bool jacobi = true;
};

struct CgResult {
  Eigen::VectorXcd x;
  SolveReport report;
};

// Conjugate gradients for a real symmetric positive definite matrix with a
// complex right-hand side (the real and imaginary parts share the search
// directions). Negative curvature is reported as breakdown, not thrown: it
// signals an assembly bug upstream.
CgResult cg(const SparseRealMatrix& A, const Eigen::VectorXcd& rhs,
            const CgOptions& opt = {});

// One "iteration,residual" line per history entry.
void write_residual_csv(const SolveReport& report, const std::string& path);

}  // namespace csmom
