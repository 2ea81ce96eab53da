#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "csmom/krylov.hpp"
#include "csmom/rwg.hpp"

namespace csmom {

enum class FormulationKind { efie, mfie, cfie, csie_jm, csie_j };
const char* to_string(FormulationKind k);
FormulationKind formulation_from_string(const std::string& name);

struct FormulationConfig {
  FormulationKind kind = FormulationKind::csie_j;
  double alpha = 1.0;        // combined-source weight
  double cfie_comb = 0.5;    // electric share of the combined field equation
  bool jm_weighting = true;  // solve for v' = v/Z0 in the two-current system
  double inner_tol = 1e-5;   // gram-solve residual inside each application
  int inner_max_iter = 200;
};

// The builders return operators that REFERENCE the passed matrices; the
// caller keeps them alive for the operator's lifetime.

// x -> j k0 Z0 T x
std::unique_ptr<LinearOperator> build_efie(const Eigen::MatrixXcd& T, double k0);

// x -> (A'/2 + K_nxb) x; the solution is the electric current directly
std::unique_ptr<LinearOperator> build_mfie(const SparseRealMatrix& Aprime,
                                           const Eigen::MatrixXcd& K_nxb);

// comb*T + (1-comb)*(Z0/(j k0 Z0))*(A'/2 + K_nxb): both constituent
// equations divided by j k0 Z0 so the comb = 1 and comb = 0 limits are the
// scaled electric and magnetic equations exactly
std::unique_ptr<LinearOperator> build_cfie(const Eigen::MatrixXcd& T,
                                           const SparseRealMatrix& Aprime,
                                           const Eigen::MatrixXcd& K_nxb,
                                           double comb, double k0);

// 2N-unknown two-current system [[j k0 Z0 T, -A/2 + K], [-alpha Z0 A, A']]
// acting on (i, v); with jm_weighting the magnetic columns carry a factor Z0
// and the solver unknown is v' = v/Z0
std::unique_ptr<LinearOperator> build_csie_jm(const Eigen::MatrixXcd& T,
                                              const Eigen::MatrixXcd& K_beta,
                                              const SparseRealMatrix& A,
                                              const SparseRealMatrix& Aprime,
                                              const FormulationConfig& cfg,
                                              double k0);

// Single-current operator x -> alpha Z0 (-A/2 + K) y + j k0 Z0 T x with
// A' y = A x solved by diagonally preconditioned CG to inner_tol inside every
// application. alpha = 0 skips the inner solve and degenerates exactly to
// the electric operator. Inner-solve failures throw with the achieved
// residual in the message.
std::unique_ptr<LinearOperator> build_csie_j(const Eigen::MatrixXcd& T,
                                             const Eigen::MatrixXcd& K_beta,
                                             const SparseRealMatrix& A,
                                             const SparseRealMatrix& Aprime,
                                             const FormulationConfig& cfg,
                                             double k0);

// v = alpha Z0 A'^{-1} A i by CG at inner_tol/10 (the post-processing
// companion of the single-current operator)
Eigen::VectorXcd recover_magnetic(const Eigen::VectorXcd& i,
                                  const SparseRealMatrix& A,
                                  const SparseRealMatrix& Aprime,
                                  const FormulationConfig& cfg);

// Outer right-hand side from the tested incident fields e and h.
Eigen::VectorXcd formulation_rhs(const FormulationConfig& cfg, double k0,
                                 const Eigen::VectorXcd& e,
                                 const Eigen::VectorXcd& h);

// Physical coefficient vectors from the solver unknown; runs the magnetic
// recovery for the single-current kind, splits and unweights the two-current
// solution, and returns zero magnetic currents for the classical kinds.
struct SurfaceCurrents {
  Eigen::VectorXcd electric;
  Eigen::VectorXcd magnetic;
};
SurfaceCurrents split_solution(const FormulationConfig& cfg,
                               const Eigen::VectorXcd& x,
                               const SparseRealMatrix& A,
                               const SparseRealMatrix& Aprime);

// Diagonal preconditioners. The plain variant is j k0 Z0 diag(T); the
// combined-source variant adds the magnetic-current contribution through the
// diagonal approximation of the inverse gram matrix,
//   D = j k0 Z0 diag(T) - alpha Z0 diag(A diag(diag(A'))^{-1} A).
Eigen::VectorXcd efie_diag_precond(const Eigen::MatrixXcd& T, double k0);
Eigen::VectorXcd csie_diag_precond(const Eigen::MatrixXcd& T,
                                   const SparseRealMatrix& A,
                                   const SparseRealMatrix& Aprime,
                                   const FormulationConfig& cfg, double k0);
// Block diagonal of the two-current system (length 2N), kind csie_jm.
Eigen::VectorXcd csie_jm_diag_precond(const Eigen::MatrixXcd& T,
                                      const SparseRealMatrix& Aprime,
                                      const FormulationConfig& cfg, double k0);

}  // namespace csmom
