#include "csmom/krylov.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace csmom {

Eigen::MatrixXcd LinearOperator::materialize() const {
  const int n = size();
  Eigen::MatrixXcd m(n, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n), col(n);
  for (int j = 0; j < n; ++j) {
    e(j) = 1.0;
    apply(e, col);
    m.col(j) = col;
    e(j) = 0.0;
  }
  return m;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::stagnated: return "stagnated";
    case SolveStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

Precond jacobi_preconditioner(const Eigen::VectorXcd& diag) {
  for (int i = 0; i < diag.size(); ++i) {
    if (std::abs(diag(i)) == 0.0) {
      throw std::invalid_argument("jacobi_preconditioner: zero diagonal entry");
    }
  }
  return [d = Eigen::VectorXcd(diag)](Eigen::VectorXcd& v) {
    v.array() /= d.array();
  };
}

namespace {

using steady = std::chrono::steady_clock;

double seconds_since(steady::time_point t0) {
  return std::chrono::duration<double>(steady::now() - t0).count();
}

// Rotation with real c and complex s, c^2 + |s|^2 = 1, mapping (a, b) with
// real b >= 0 to (r, 0).
void make_givens(cplx a, double b, double& c, cplx& s, cplx& r) {
  double aa = std::abs(a);
  double rr = std::hypot(aa, b);
  if (rr == 0.0) {
    c = 1.0;
    s = 0.0;
    r = 0.0;
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = 1.0;
    r = b;
    return;
  }
  cplx alpha = a / aa;
  c = aa / rr;
  s = alpha * (b / rr);
  r = alpha * rr;
}

}  // namespace

GmresResult gmres(const LinearOperator& op, const Eigen::VectorXcd& rhs,
                  const GmresOptions& opt) {
  const int n = op.size();
  if (rhs.size() != n) throw std::invalid_argument("gmres: dimension mismatch");
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) {
    throw std::invalid_argument("gmres: tol must lie in (0,1)");
  }
  if (opt.max_iter < 1) throw std::invalid_argument("gmres: max_iter must be positive");
  if (opt.restart < 0) throw std::invalid_argument("gmres: restart must be nonnegative");
  if (opt.stagnation_window < 1) {
    throw std::invalid_argument("gmres: stagnation window must be positive");
  }

  auto t0 = steady::now();
  InnerSolveStats inner0 = op.inner_stats();
  GmresResult res;
  SolveReport& rep = res.report;
  res.x = Eigen::VectorXcd::Zero(n);

  auto finalize = [&](SolveStatus st, double achieved) {
    rep.status = st;
    rep.achieved_residual = achieved;
    rep.wall_time_s = seconds_since(t0);
    rep.inner_iterations = op.inner_stats().iterations - inner0.iterations;
    rep.mean_inner_per_matvec =
        rep.matvec_count > 0
            ? static_cast<double>(rep.inner_iterations) / static_cast<double>(rep.matvec_count)
            : 0.0;
  };

  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    rep.residual_history = {0.0};
    finalize(SolveStatus::converged, 0.0);
    return res;
  }

  Eigen::VectorXcd pb = rhs;
  if (opt.precond) opt.precond(pb);
  const double pbnorm = pb.norm();
  if (!(pbnorm > 0.0) || !std::isfinite(pbnorm)) {
    rep.residual_history = {1.0};
    finalize(SolveStatus::breakdown, 1.0);
    return res;
  }

  rep.residual_history.push_back(1.0);

  const int cycle = opt.restart > 0 ? std::min(opt.restart, opt.max_iter) : opt.max_iter;

  Eigen::VectorXcd w(n), ax(n);
  auto true_residual = [&](const Eigen::VectorXcd& x) {
    op.apply(x, ax);
    ++rep.matvec_count;
    return (rhs - ax).norm() / bnorm;
  };

  int total_it = 0;
  bool first_cycle = true;
  while (true) {
    Eigen::VectorXcd r;
    if (first_cycle) {
      r = pb;  // iterate is zero
      first_cycle = false;
    } else {
      op.apply(res.x, ax);
      ++rep.matvec_count;
      r = rhs - ax;
      if (opt.precond) opt.precond(r);
    }
    double beta = r.norm();
    if (beta == 0.0) {
      double tr = true_residual(res.x);
      finalize(tr <= opt.tol ? SolveStatus::converged : SolveStatus::breakdown, tr);
      return res;
    }

    const int m = std::min(cycle, opt.max_iter - total_it);
    int cols = std::min(m + 1, 64);
    Eigen::MatrixXcd V(n, cols);
    V.col(0) = r / beta;
    std::vector<std::vector<cplx>> h(m);  // rotated upper-triangular columns
    std::vector<double> cs(m);
    std::vector<cplx> sn(m);
    std::vector<cplx> g(m + 1, cplx(0));
    g[0] = beta;

    // left preconditioning can make the Arnoldi estimate optimistic relative
    // to the unpreconditioned residual; after a failed convergence check the
    // internal target tightens and iterations continue in the same space
    double check_at = opt.tol;

    auto candidate = [&](int k) {
      std::vector<cplx> y(k + 1);
      for (int i = k; i >= 0; --i) {
        cplx acc = g[i];
        for (int l = i + 1; l <= k; ++l) acc -= h[l][i] * y[l];
        y[i] = acc / h[i][i];
      }
      Eigen::VectorXcd x = res.x;
      for (int l = 0; l <= k; ++l) x += y[l] * V.col(l);
      return x;
    };

    int j = 0;
    for (; j < m; ++j) {
      if (j + 1 >= cols) {
        cols = std::min(m + 1, cols * 2);
        V.conservativeResize(Eigen::NoChange, cols);
      }
      op.apply(V.col(j), w);
      ++rep.matvec_count;
      if (opt.precond) opt.precond(w);
      h[j].resize(j + 2);
      for (int i = 0; i <= j; ++i) {
        cplx hij = V.col(i).dot(w);
        w -= hij * V.col(i);
        h[j][i] = hij;
      }
      double hnext = w.norm();
      for (int i = 0; i < j; ++i) {
        cplx t = cs[i] * h[j][i] + sn[i] * h[j][i + 1];
        h[j][i + 1] = -std::conj(sn[i]) * h[j][i] + cs[i] * h[j][i + 1];
        h[j][i] = t;
      }
      cplx rr;
      make_givens(h[j][j], hnext, cs[j], sn[j], rr);
      h[j][j] = rr;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      ++total_it;
      rep.iterations = total_it;
      double est = std::abs(g[j + 1]) / pbnorm;
      rep.residual_history.push_back(est);

      bool happy = hnext == 0.0 || !(est > 0.0);
      if (!happy) V.col(j + 1) = w / hnext;

      bool stagnant = false;
      {
        const auto& hist = rep.residual_history;
        int k = static_cast<int>(hist.size()) - 1;
        if (k >= opt.stagnation_window) {
          stagnant = hist[k] > 0.999 * hist[k - opt.stagnation_window];
        }
      }
      bool out_of_iters = total_it >= opt.max_iter;

      if (est <= check_at || happy || stagnant || out_of_iters) {
        Eigen::VectorXcd xc = candidate(j);
        double tr = true_residual(xc);
        if (tr <= opt.tol) {
          res.x = std::move(xc);
          finalize(SolveStatus::converged, tr);
          return res;
        }
        if (happy || stagnant || out_of_iters) {
          res.x = std::move(xc);
          finalize(happy      ? SolveStatus::breakdown
                   : stagnant ? SolveStatus::stagnated
                              : SolveStatus::max_iterations,
                   tr);
          return res;
        }
        check_at = est * 0.25;
      }
    }
    res.x = candidate(m - 1);
  }
}

CgResult cg(const SparseRealMatrix& A, const Eigen::VectorXcd& rhs,
            const CgOptions& opt) {
  if (A.symmetry != GramSymmetry::symmetric) {
    throw std::invalid_argument("cg: matrix must be tagged symmetric");
  }
  const int n = static_cast<int>(A.mat.rows());
  if (A.mat.cols() != n || rhs.size() != n) {
    throw std::invalid_argument("cg: dimension mismatch");
  }
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) {
    throw std::invalid_argument("cg: tol must lie in (0,1)");
  }
  if (opt.max_iter < 1) throw std::invalid_argument("cg: max_iter must be positive");

  auto t0 = steady::now();
  CgResult res;
  SolveReport& rep = res.report;
  res.x = Eigen::VectorXcd::Zero(n);

  Eigen::VectorXd vr(n), vi(n), ur(n), ui(n);
  auto spmv = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    vr = v.real();
    vi = v.imag();
    ur.noalias() = A.mat * vr;
    ui.noalias() = A.mat * vi;
    out.resize(n);
    out.real() = ur;
    out.imag() = ui;
    ++rep.matvec_count;
  };

  const double bnorm = rhs.norm();
  auto finalize = [&](SolveStatus st) {
    if (bnorm > 0.0 && res.x.norm() > 0.0) {
      Eigen::VectorXcd ax(n);
      spmv(res.x, ax);
      rep.achieved_residual = (rhs - ax).norm() / bnorm;
    } else {
      rep.achieved_residual = bnorm > 0.0 ? 1.0 : 0.0;
    }
    rep.status = st;
    rep.wall_time_s = seconds_since(t0);
  };

  if (bnorm == 0.0) {
    rep.residual_history = {0.0};
    finalize(SolveStatus::converged);
    return res;
  }

  Eigen::VectorXcd dinv;
  if (opt.jacobi) {
    Eigen::VectorXd d = A.mat.diagonal();
    if ((d.array() <= 0.0).any()) {
      // a symmetric matrix with a nonpositive diagonal entry cannot be SPD
      rep.residual_history = {1.0};
      finalize(SolveStatus::breakdown);
      return res;
    }
    dinv = d.cwiseInverse().cast<cplx>();
  }
  auto precondition = [&](const Eigen::VectorXcd& v) {
    return opt.jacobi ? Eigen::VectorXcd(v.cwiseProduct(dinv)) : v;
  };

  rep.residual_history.push_back(1.0);
  Eigen::VectorXcd r = rhs;
  Eigen::VectorXcd z = precondition(r);
  Eigen::VectorXcd p = z;
  double rz = r.dot(z).real();
  Eigen::VectorXcd Ap(n), ax(n);

  for (int it = 1; it <= opt.max_iter; ++it) {
    spmv(p, Ap);
    double pAp = p.dot(Ap).real();
    if (!(pAp > 0.0)) {
      rep.iterations = it;
      finalize(SolveStatus::breakdown);
      return res;
    }
    double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    double rel = r.norm() / bnorm;
    rep.residual_history.push_back(rel);
    rep.iterations = it;

    if (rel <= opt.tol) {
      spmv(res.x, ax);
      Eigen::VectorXcd rt = rhs - ax;
      double tres = rt.norm() / bnorm;
      if (tres <= opt.tol) {
        rep.achieved_residual = tres;
        rep.status = SolveStatus::converged;
        rep.wall_time_s = seconds_since(t0);
        return res;
      }
      // recursion drift: replace the tracked residual and restart the direction
      r = std::move(rt);
      z = precondition(r);
      rz = r.dot(z).real();
      p = z;
      continue;
    }

    z = precondition(r);
    double rz2 = r.dot(z).real();
    p = z + (rz2 / rz) * p;
    rz = rz2;
  }
  finalize(SolveStatus::max_iterations);
  return res;
}

void write_residual_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_residual_csv: cannot open " + path);
  out << "iteration,residual\n" << std::scientific << std::setprecision(16);
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    out << i << "," << report.residual_history[i] << "\n";
  }
}

}  // namespace csmom
