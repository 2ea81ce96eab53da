#include "csmom/formulations.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace csmom {

const char* to_string(FormulationKind k) {
  switch (k) {
    case FormulationKind::efie: return "efie";
    case FormulationKind::mfie: return "mfie";
    case FormulationKind::cfie: return "cfie";
    case FormulationKind::csie_jm: return "csie-jm";
    case FormulationKind::csie_j: return "csie-j";
  }
  return "unknown";
}

FormulationKind formulation_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "efie") return FormulationKind::efie;
  if (s == "mfie") return FormulationKind::mfie;
  if (s == "cfie") return FormulationKind::cfie;
  if (s == "csie-jm") return FormulationKind::csie_jm;
  if (s == "csie-j") return FormulationKind::csie_j;
  throw std::invalid_argument("unknown formulation: " + name);
}

namespace {

void spmul(const Eigen::SparseMatrix<double>& A,
           const Eigen::Ref<const Eigen::VectorXcd>& x, Eigen::VectorXcd& out) {
  Eigen::VectorXd xr = x.real(), xi = x.imag();
  Eigen::VectorXd yr = A * xr, yi = A * xi;
  out.resize(A.rows());
  out.real() = yr;
  out.imag() = yi;
}

void check_config(const FormulationConfig& cfg, bool needs_positive_alpha) {
  if (cfg.alpha < 0.0) {
    throw std::invalid_argument("formulation: alpha must be nonnegative");
  }
  if (needs_positive_alpha && cfg.alpha == 0.0) {
    throw std::invalid_argument("two-current formulation requires alpha > 0");
  }
  if (!(cfg.inner_tol > 0.0 && cfg.inner_tol < 1.0)) {
    throw std::invalid_argument("formulation: inner_tol must lie in (0,1)");
  }
  if (cfg.inner_max_iter < 1) {
    throw std::invalid_argument("formulation: inner_max_iter must be positive");
  }
}

void check_square(const Eigen::MatrixXcd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "formulation: " << what << " must be square and nonempty, got "
       << m.rows() << "x" << m.cols();
    throw std::invalid_argument(os.str());
  }
}

void check_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << "formulation: " << what << " has dimension " << got << ", expected "
       << want;
    throw std::invalid_argument(os.str());
  }
}

Eigen::VectorXcd gram_solve(const SparseRealMatrix& Aprime,
                            const Eigen::VectorXcd& rhs, double tol,
                            int max_iter, std::atomic<long>* iter_counter,
                            std::atomic<long>* solve_counter) {
  CgOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  auto result = cg(Aprime, rhs, opt);
  if (iter_counter) *iter_counter += result.report.iterations;
  if (solve_counter) *solve_counter += 1;
  if (!result.report.success()) {
    std::ostringstream os;
    os << "gram solve failed: " << to_string(result.report.status)
       << " after " << result.report.iterations
       << " iterations, achieved residual " << result.report.achieved_residual
       << " (target " << tol << ")";
    throw std::runtime_error(os.str());
  }
  return std::move(result.x);
}

class EfieOperator final : public LinearOperator {
 public:
  EfieOperator(const Eigen::MatrixXcd& T, double k0) : T_(T), scale_(jj * k0 * z0) {}
  int size() const override { return static_cast<int>(T_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    y.noalias() = scale_ * (T_ * x);
  }
  Eigen::MatrixXcd materialize() const override { return scale_ * T_; }

 private:
  const Eigen::MatrixXcd& T_;
  cplx scale_;
};

class MfieOperator final : public LinearOperator {
 public:
  MfieOperator(const SparseRealMatrix& Aprime, const Eigen::MatrixXcd& K)
      : Ap_(Aprime), K_(K) {}
  int size() const override { return static_cast<int>(K_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    Eigen::VectorXcd gx;
    spmul(Ap_.mat, x, gx);
    y.noalias() = K_ * x;
    y += 0.5 * gx;
  }
  Eigen::MatrixXcd materialize() const override {
    return K_ + 0.5 * Eigen::MatrixXd(Ap_.mat).cast<cplx>();
  }

 private:
  const SparseRealMatrix& Ap_;
  const Eigen::MatrixXcd& K_;
};

class CfieOperator final : public LinearOperator {
 public:
  CfieOperator(const Eigen::MatrixXcd& T, const SparseRealMatrix& Aprime,
               const Eigen::MatrixXcd& K, double comb, double k0)
      : T_(T), Ap_(Aprime), K_(K), comb_(comb), mag_scale_(1.0 / (jj * k0)) {}
  int size() const override { return static_cast<int>(T_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    y.noalias() = comb_ * (T_ * x);
    if (comb_ < 1.0) {
      Eigen::VectorXcd gx;
      spmul(Ap_.mat, x, gx);
      y.noalias() += ((1.0 - comb_) * mag_scale_) * (K_ * x);
      y += (0.5 * (1.0 - comb_) * mag_scale_) * gx;
    }
  }
  Eigen::MatrixXcd materialize() const override {
    Eigen::MatrixXcd m = comb_ * T_;
    if (comb_ < 1.0) {
      m += ((1.0 - comb_) * mag_scale_) *
           (K_ + 0.5 * Eigen::MatrixXd(Ap_.mat).cast<cplx>());
    }
    return m;
  }

 private:
  const Eigen::MatrixXcd& T_;
  const SparseRealMatrix& Ap_;
  const Eigen::MatrixXcd& K_;
  double comb_;
  cplx mag_scale_;
};

class CsieJmOperator final : public LinearOperator {
 public:
  CsieJmOperator(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& K,
                 const SparseRealMatrix& A, const SparseRealMatrix& Aprime,
                 const FormulationConfig& cfg, double k0)
      : T_(T),
        K_(K),
        A_(A),
        Ap_(Aprime),
        alpha_(cfg.alpha),
        mag_(cfg.jm_weighting ? z0 : 1.0),
        escale_(jj * k0 * z0) {}
  int size() const override { return 2 * static_cast<int>(T_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    const int n = static_cast<int>(T_.rows());
    auto xi = x.head(n);
    auto xv = x.tail(n);
    Eigen::VectorXcd Axv, Axi, Apxv;
    spmul(A_.mat, xv, Axv);
    spmul(A_.mat, xi, Axi);
    spmul(Ap_.mat, xv, Apxv);
    y.resize(2 * n);
    y.head(n).noalias() = escale_ * (T_ * xi);
    y.head(n).noalias() += mag_ * (K_ * xv);
    y.head(n) -= (0.5 * mag_) * Axv;
    y.tail(n) = mag_ * Apxv - (alpha_ * z0) * Axi;
  }
  Eigen::MatrixXcd materialize() const override {
    const int n = static_cast<int>(T_.rows());
    Eigen::MatrixXcd m(2 * n, 2 * n);
    Eigen::MatrixXcd Ad = Eigen::MatrixXd(A_.mat).cast<cplx>();
    m.topLeftCorner(n, n) = escale_ * T_;
    m.topRightCorner(n, n) = mag_ * (K_ - 0.5 * Ad);
    m.bottomLeftCorner(n, n) = (-alpha_ * z0) * Ad;
    m.bottomRightCorner(n, n) = mag_ * Eigen::MatrixXd(Ap_.mat).cast<cplx>();
    return m;
  }

 private:
  const Eigen::MatrixXcd& T_;
  const Eigen::MatrixXcd& K_;
  const SparseRealMatrix& A_;
  const SparseRealMatrix& Ap_;
  double alpha_;
  double mag_;
  cplx escale_;
};

class CsieJOperator final : public LinearOperator {
 public:
  CsieJOperator(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& K,
                const SparseRealMatrix& A, const SparseRealMatrix& Aprime,
                const FormulationConfig& cfg, double k0)
      : T_(T), K_(K), A_(A), Ap_(Aprime), cfg_(cfg), escale_(jj * k0 * z0) {}
  int size() const override { return static_cast<int>(T_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    y.noalias() = escale_ * (T_ * x);
    if (cfg_.alpha == 0.0) return;
    Eigen::VectorXcd u;
    spmul(A_.mat, x, u);
    if (u.norm() == 0.0) {
      solves_ += 1;
      return;
    }
    Eigen::VectorXcd w =
        gram_solve(Ap_, u, cfg_.inner_tol, cfg_.inner_max_iter, &inner_iters_,
                   &solves_);
    Eigen::VectorXcd Aw;
    spmul(A_.mat, w, Aw);
    y.noalias() += (cfg_.alpha * z0) * (K_ * w);
    y -= (0.5 * cfg_.alpha * z0) * Aw;
  }
  Eigen::MatrixXcd materialize() const override {
    // exact closed form through a direct factorization of the gram matrix
    Eigen::MatrixXcd m = escale_ * T_;
    if (cfg_.alpha == 0.0) return m;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ap_.mat);
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("gram matrix factorization failed");
    }
    Eigen::MatrixXd Y = ldlt.solve(Eigen::MatrixXd(A_.mat));
    Eigen::MatrixXcd F =
        K_ - 0.5 * Eigen::MatrixXd(A_.mat).cast<cplx>();
    m.noalias() += (cfg_.alpha * z0) * (F * Y.cast<cplx>());
    return m;
  }
  InnerSolveStats inner_stats() const override {
    return {inner_iters_.load(), solves_.load()};
  }

 private:
  const Eigen::MatrixXcd& T_;
  const Eigen::MatrixXcd& K_;
  const SparseRealMatrix& A_;
  const SparseRealMatrix& Ap_;
  FormulationConfig cfg_;
  cplx escale_;
  mutable std::atomic<long> inner_iters_{0};
  mutable std::atomic<long> solves_{0};
};

void check_gram(const SparseRealMatrix& A, const SparseRealMatrix& Aprime,
                Eigen::Index n) {
  check_size(A.mat.rows(), n, "gram matrix A");
  check_size(Aprime.mat.rows(), n, "gram matrix A'");
  if (Aprime.symmetry != GramSymmetry::symmetric) {
    throw std::invalid_argument("formulation: A' must be tagged symmetric");
  }
}

}  // namespace

std::unique_ptr<LinearOperator> build_efie(const Eigen::MatrixXcd& T,
                                           double k0) {
  check_square(T, "T");
  if (k0 <= 0.0) throw std::invalid_argument("formulation: k0 must be positive");
  return std::make_unique<EfieOperator>(T, k0);
}

std::unique_ptr<LinearOperator> build_mfie(const SparseRealMatrix& Aprime,
                                           const Eigen::MatrixXcd& K_nxb) {
  check_square(K_nxb, "K");
  check_size(Aprime.mat.rows(), K_nxb.rows(), "gram matrix A'");
  return std::make_unique<MfieOperator>(Aprime, K_nxb);
}

std::unique_ptr<LinearOperator> build_cfie(const Eigen::MatrixXcd& T,
                                           const SparseRealMatrix& Aprime,
                                           const Eigen::MatrixXcd& K_nxb,
                                           double comb, double k0) {
  check_square(T, "T");
  check_size(K_nxb.rows(), T.rows(), "K");
  check_size(Aprime.mat.rows(), T.rows(), "gram matrix A'");
  if (k0 <= 0.0) throw std::invalid_argument("formulation: k0 must be positive");
  if (!(comb >= 0.0 && comb <= 1.0)) {
    throw std::invalid_argument("formulation: cfie_comb must lie in [0,1]");
  }
  return std::make_unique<CfieOperator>(T, Aprime, K_nxb, comb, k0);
}

std::unique_ptr<LinearOperator> build_csie_jm(const Eigen::MatrixXcd& T,
                                              const Eigen::MatrixXcd& K_beta,
                                              const SparseRealMatrix& A,
                                              const SparseRealMatrix& Aprime,
                                              const FormulationConfig& cfg,
                                              double k0) {
  check_square(T, "T");
  check_size(K_beta.rows(), T.rows(), "K");
  check_gram(A, Aprime, T.rows());
  check_config(cfg, true);
  if (k0 <= 0.0) throw std::invalid_argument("formulation: k0 must be positive");
  return std::make_unique<CsieJmOperator>(T, K_beta, A, Aprime, cfg, k0);
}

std::unique_ptr<LinearOperator> build_csie_j(const Eigen::MatrixXcd& T,
                                             const Eigen::MatrixXcd& K_beta,
                                             const SparseRealMatrix& A,
                                             const SparseRealMatrix& Aprime,
                                             const FormulationConfig& cfg,
                                             double k0) {
  check_square(T, "T");
  check_size(K_beta.rows(), T.rows(), "K");
  check_gram(A, Aprime, T.rows());
  check_config(cfg, false);
  if (k0 <= 0.0) throw std::invalid_argument("formulation: k0 must be positive");
  return std::make_unique<CsieJOperator>(T, K_beta, A, Aprime, cfg, k0);
}

Eigen::VectorXcd recover_magnetic(const Eigen::VectorXcd& i,
                                  const SparseRealMatrix& A,
                                  const SparseRealMatrix& Aprime,
                                  const FormulationConfig& cfg) {
  check_config(cfg, false);
  check_size(A.mat.rows(), i.size(), "gram matrix A");
  check_size(Aprime.mat.rows(), i.size(), "gram matrix A'");
  if (cfg.alpha == 0.0 || i.norm() == 0.0) {
    return Eigen::VectorXcd::Zero(i.size());
  }
  Eigen::VectorXcd u;
  spmul(A.mat, i, u);
  if (u.norm() == 0.0) return Eigen::VectorXcd::Zero(i.size());
  Eigen::VectorXcd y = gram_solve(Aprime, u, cfg.inner_tol / 10.0,
                                  cfg.inner_max_iter, nullptr, nullptr);
  return (cfg.alpha * z0) * y;
}

Eigen::VectorXcd formulation_rhs(const FormulationConfig& cfg, double k0,
                                 const Eigen::VectorXcd& e,
                                 const Eigen::VectorXcd& h) {
  const auto n = e.size();
  switch (cfg.kind) {
    case FormulationKind::efie:
    case FormulationKind::csie_j:
      return e;
    case FormulationKind::csie_jm: {
      Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2 * n);
      b.head(n) = e;
      return b;
    }
    case FormulationKind::mfie:
      check_size(h.size(), n, "magnetic rhs");
      return h;
    case FormulationKind::cfie: {
      check_size(h.size(), n, "magnetic rhs");
      if (k0 <= 0.0) {
        throw std::invalid_argument("formulation: k0 must be positive");
      }
      return (cfg.cfie_comb * e + ((1.0 - cfg.cfie_comb) * z0) * h) /
             (jj * k0 * z0);
    }
  }
  throw std::invalid_argument("formulation_rhs: unknown kind");
}

SurfaceCurrents split_solution(const FormulationConfig& cfg,
                               const Eigen::VectorXcd& x,
                               const SparseRealMatrix& A,
                               const SparseRealMatrix& Aprime) {
  SurfaceCurrents out;
  switch (cfg.kind) {
    case FormulationKind::efie:
    case FormulationKind::mfie:
    case FormulationKind::cfie:
      out.electric = x;
      out.magnetic = Eigen::VectorXcd::Zero(x.size());
      return out;
    case FormulationKind::csie_jm: {
      if (x.size() % 2 != 0) {
        throw std::invalid_argument("split_solution: odd two-current vector");
      }
      const auto n = x.size() / 2;
      out.electric = x.head(n);
      out.magnetic = (cfg.jm_weighting ? z0 : 1.0) * x.tail(n);
      return out;
    }
    case FormulationKind::csie_j:
      out.electric = x;
      out.magnetic = recover_magnetic(x, A, Aprime, cfg);
      return out;
  }
  throw std::invalid_argument("split_solution: unknown kind");
}

Eigen::VectorXcd efie_diag_precond(const Eigen::MatrixXcd& T, double k0) {
  check_square(T, "T");
  if (k0 <= 0.0) throw std::invalid_argument("formulation: k0 must be positive");
  Eigen::VectorXcd d = (jj * k0 * z0) * T.diagonal();
  for (int i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) == 0.0) {
      throw std::invalid_argument("diagonal preconditioner: zero entry");
    }
  }
  return d;
}

Eigen::VectorXcd csie_diag_precond(const Eigen::MatrixXcd& T,
                                   const SparseRealMatrix& A,
                                   const SparseRealMatrix& Aprime,
                                   const FormulationConfig& cfg, double k0) {
  check_gram(A, Aprime, T.rows());
  check_config(cfg, false);
  Eigen::VectorXcd d = efie_diag_precond(T, k0);
  if (cfg.alpha == 0.0) return d;
  Eigen::VectorXd dap = Aprime.mat.diagonal();
  if ((dap.array() <= 0.0).any()) {
    throw std::invalid_argument("diagonal preconditioner: nonpositive A' diagonal");
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(T.rows());
  for (int k = 0; k < A.mat.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A.mat, k); it; ++it) {
      // diag(A diag(diag(A'))^{-1} A) row term: A_nk A_kn = -A_nk^2
      s(it.row()) -= it.value() * it.value() / dap(it.col());
    }
  }
  d -= (cfg.alpha * z0) * s.cast<cplx>();
  for (int i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) == 0.0) {
      throw std::invalid_argument("diagonal preconditioner: zero entry");
    }
  }
  return d;
}

Eigen::VectorXcd csie_jm_diag_precond(const Eigen::MatrixXcd& T,
                                      const SparseRealMatrix& Aprime,
                                      const FormulationConfig& cfg, double k0) {
  check_square(T, "T");
  check_size(Aprime.mat.rows(), T.rows(), "gram matrix A'");
  check_config(cfg, true);
  const auto n = T.rows();
  Eigen::VectorXcd d(2 * n);
  d.head(n) = (jj * k0 * z0) * T.diagonal();
  double mag = cfg.jm_weighting ? z0 : 1.0;
  d.tail(n) = (mag * Eigen::VectorXd(Aprime.mat.diagonal())).cast<cplx>();
  for (int i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) == 0.0) {
      throw std::invalid_argument("diagonal preconditioner: zero entry");
    }
  }
  return d;
}

}  // namespace csmom
