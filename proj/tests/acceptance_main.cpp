// Acceptance gate. Runs the end-to-end checks the solver must satisfy and
// prints one [PASS]/[FAIL] line per criterion; exit status is nonzero if any
// fail. Criteria can be selected by number on the command line.
//
// Thresholds are pinned next to each measurement. Quantitative gates run on
// two scatterers: the icosphere, where the analytic series is the reference,
// and a sharp-edged cube scored against a fine-mesh field solution of the
// same shape. The second-kind error penalty (criteria 2 and 10) is a property
// of scatterers with edges, so those gates run on the cube; the smooth-sphere
// numbers are printed alongside for reference.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csmom/excitation.hpp"
#include "csmom/farfield.hpp"
#include "csmom/formulations.hpp"
#include "csmom/krylov.hpp"
#include "csmom/mesh.hpp"
#include "csmom/mie.hpp"
#include "csmom/operators.hpp"
#include "csmom/physics.hpp"
#include "csmom/rwg.hpp"
#include "csmom/spectrum.hpp"

using namespace csmom;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double secs(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

void spmul(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXcd& x,
           Eigen::VectorXcd& out) {
  Eigen::VectorXd yr = A * x.real().eval(), yi = A * x.imag().eval();
  out.resize(A.rows());
  out.real() = yr;
  out.imag() = yi;
}

// ---------------------------------------------------------------------------
// shared fixtures, built on first use

const PlaneWave& wave() {
  static const PlaneWave pw(Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX());
  return pw;
}

const std::vector<Direction>& grid() {
  static const auto g = direction_grid(10.0);
  return g;
}

struct Problem {
  RwgBasis basis;
  SparseRealMatrix A, Ap;
  OperatorSet ops;
  double k0;
  PhysicalContext ctx;
  Eigen::VectorXcd e, h;

  Problem(Mesh mesh, double k0_, bool want_nxb)
      : basis(std::move(mesh)),
        A(assemble_gram_A(basis)),
        Ap(assemble_gram_Aprime(basis)),
        k0(k0_),
        ctx(PhysicalContext::from_wavenumber(k0_)) {
    AssemblyRequest req;
    req.want_T = req.want_K_beta = true;
    req.want_K_nxbeta = want_nxb;
    ops = assemble_operators(basis, k0, {}, req);
    e = rhs_efie(basis, wave(), k0);
    h = rhs_mfie(basis, wave(), k0);
  }

  std::unique_ptr<LinearOperator> build(const FormulationConfig& fc) const {
    switch (fc.kind) {
      case FormulationKind::efie: return build_efie(ops.T, k0);
      case FormulationKind::mfie: return build_mfie(Ap, ops.K_nxbeta);
      case FormulationKind::cfie:
        return build_cfie(ops.T, Ap, ops.K_nxbeta, fc.cfie_comb, k0);
      case FormulationKind::csie_j:
        return build_csie_j(ops.T, ops.K_beta, A, Ap, fc, k0);
      case FormulationKind::csie_jm:
        return build_csie_jm(ops.T, ops.K_beta, A, Ap, fc, k0);
    }
    throw std::logic_error("unreachable");
  }

  // Converged solution or an exception; iteration count via out-param.
  Eigen::VectorXcd solve(const FormulationConfig& fc, double tol,
                         int* iters = nullptr) const {
    GmresOptions go;
    go.tol = tol;
    go.max_iter = 3000;
    const auto r = gmres(*build(fc), formulation_rhs(fc, k0, e, h), go);
    if (iters) *iters = r.report.iterations;
    if (!r.report.success())
      throw std::runtime_error(fmt("%s solve: %s after %d iterations",
                                   to_string(fc.kind),
                                   to_string(r.report.status),
                                   r.report.iterations));
    return r.x;
  }

  FarFieldSet fields(const FormulationConfig& fc, double tol,
                     int* iters = nullptr) const {
    const auto x = solve(fc, tol, iters);
    const auto sc = split_solution(fc, x, A, Ap);
    return far_field(basis, sc.electric, sc.magnetic, ctx, grid());
  }
};

// icosphere, diameter 1 m, ka = 1.6: off-resonance accuracy scatterer
Problem& sphere3() {
  static Problem p(gen_icosphere(1.0, 3), 3.2, true);
  return p;
}
Problem& sphere2() {
  static Problem p(gen_icosphere(1.0, 2), 3.2, true);
  return p;
}
// cube, edge 1 m, lambda 2 m: the edge-singularity scatterer
Problem& cube4() {
  static Problem p(gen_cube(1.0, 4), pi, true);
  return p;
}

struct SphereErrors {
  double efie, mfie;
  std::array<double, 3> cfie;  // comb 0.2, 0.5, 0.9
  std::array<double, 4> csie;  // alpha 0.5, 1, 2.7, 10
};
constexpr std::array<double, 3> kCombs{0.2, 0.5, 0.9};
constexpr std::array<double, 4> kAlphas{0.5, 1.0, 2.7, 10.0};

const SphereErrors& sphere3_errors() {
  static const SphereErrors errs = [] {
    Problem& p = sphere3();
    const FarFieldSet mie = mie_far_field(1.0, p.ctx, wave(), grid());
    SphereErrors e{};
    FormulationConfig fc;
    fc.kind = FormulationKind::efie;
    e.efie = farfield_error_db(p.fields(fc, 1e-6), mie);
    fc.kind = FormulationKind::mfie;
    e.mfie = farfield_error_db(p.fields(fc, 1e-6), mie);
    for (size_t i = 0; i < kCombs.size(); ++i) {
      fc.kind = FormulationKind::cfie;
      fc.cfie_comb = kCombs[i];
      e.cfie[i] = farfield_error_db(p.fields(fc, 1e-6), mie);
    }
    for (size_t i = 0; i < kAlphas.size(); ++i) {
      fc.kind = FormulationKind::csie_j;
      fc.alpha = kAlphas[i];
      fc.inner_tol = 1e-7;
      e.csie[i] = farfield_error_db(p.fields(fc, 1e-6), mie);
    }
    return e;
  }();
  return errs;
}

struct CubeErrors {
  double efie, mfie;
  std::array<double, 3> cfie;
  double csie1;
};

const CubeErrors& cube_errors() {
  static const CubeErrors errs = [] {
    Problem& p = cube4();
    // reference: the same shape at twice the resolution, first-kind solution
    RwgBasis fine(gen_cube(1.0, 8));
    AssemblyRequest tonly;
    tonly.want_T = true;
    const OperatorSet fine_ops = assemble_operators(fine, p.k0, {}, tonly);
    GmresOptions go;
    go.tol = 1e-6;
    go.max_iter = 3000;
    const auto r =
        gmres(*build_efie(fine_ops.T, p.k0), rhs_efie(fine, wave(), p.k0), go);
    if (!r.report.success()) throw std::runtime_error("cube reference solve failed");
    const FarFieldSet ref = far_field(fine, r.x, {}, p.ctx, grid());

    CubeErrors e{};
    FormulationConfig fc;
    fc.kind = FormulationKind::efie;
    e.efie = farfield_error_db(p.fields(fc, 1e-6), ref);
    fc.kind = FormulationKind::mfie;
    e.mfie = farfield_error_db(p.fields(fc, 1e-6), ref);
    for (size_t i = 0; i < kCombs.size(); ++i) {
      fc.kind = FormulationKind::cfie;
      fc.cfie_comb = kCombs[i];
      e.cfie[i] = farfield_error_db(p.fields(fc, 1e-6), ref);
    }
    fc.kind = FormulationKind::csie_j;
    fc.alpha = 1.0;
    fc.inner_tol = 1e-7;
    e.csie1 = farfield_error_db(p.fields(fc, 1e-6), ref);
    return e;
  }();
  return errs;
}

// first interior TM resonance of the unit-diameter sphere
double resonant_k() {
  static const double k = [] {
    const auto modes = cavity_resonances(1.0, 1);
    return 2.0 * modes.at(0).x;  // x = k * radius
  }();
  return k;
}

// ---------------------------------------------------------------------------
// criteria

void criterion_1() {
  const SphereErrors& e = sphere3_errors();
  const double err_e = e.efie, err_j = e.csie[1];  // alpha = 1
  const bool pass = err_e <= -25.0 && err_j <= -25.0 &&
                    std::abs(err_e - err_j) <= 3.0;
  report(1, "sphere-accuracy", pass,
         fmt("efie %.2f dB, csie-j(a=1) %.2f dB vs series (gates: both <= -25, "
             "|diff| <= 3)",
             err_e, err_j));
}

void criterion_2() {
  const CubeErrors& c = cube_errors();
  const SphereErrors& s = sphere3_errors();
  const double gap = c.mfie - c.csie1;
  const bool between = c.csie1 < c.cfie[1] && c.cfie[1] < c.mfie;
  const bool pass = gap >= 6.0 && between;
  report(2, "second-kind-error-penalty", pass,
         fmt("cube: mfie %.2f, cfie(.5) %.2f, csie-j %.2f dB, gap %.2f "
             "(gates: gap >= 6, cfie between; smooth sphere gap %.2f for "
             "reference)",
             c.mfie, c.cfie[1], c.csie1, gap, s.mfie - s.csie[1]));
}

void criterion_3() {
  const double kres = resonant_k();
  RwgBasis basis(gen_icosphere(1.0, 2));
  const auto A = assemble_gram_A(basis);
  const auto Ap = assemble_gram_Aprime(basis);
  AssemblyRequest req;
  req.want_T = req.want_K_beta = true;

  std::vector<double> cond_e, cond_j, err_j;
  for (int i = 0; i <= 20; ++i) {
    const double k0 = kres * (0.90 + 0.01 * i);
    const auto ctx = PhysicalContext::from_wavenumber(k0);
    const OperatorSet ops = assemble_operators(basis, k0, {}, req);
    FormulationConfig fc;
    fc.kind = FormulationKind::efie;
    cond_e.push_back(condition_number(build_efie(ops.T, k0)->materialize()));
    fc.kind = FormulationKind::csie_j;
    fc.alpha = 1.0;
    fc.inner_tol = 1e-7;
    cond_j.push_back(condition_number(
        build_csie_j(ops.T, ops.K_beta, A, Ap, fc, k0)->materialize()));

    GmresOptions go;
    go.tol = 1e-6;
    go.max_iter = 3000;
    const auto e = rhs_efie(basis, wave(), k0);
    const auto r = gmres(*build_csie_j(ops.T, ops.K_beta, A, Ap, fc, k0),
                         formulation_rhs(fc, k0, e, {}), go);
    if (!r.report.success()) {
      report(3, "resonance-immunity", false,
             fmt("csie-j solve diverged at k0 = %.4f", k0));
      return;
    }
    const auto sc = split_solution(fc, r.x, A, Ap);
    const FarFieldSet ff =
        far_field(basis, sc.electric, sc.magnetic, ctx, grid());
    err_j.push_back(
        farfield_error_db(ff, mie_far_field(1.0, ctx, wave(), grid())));
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double peak_e = *std::max_element(cond_e.begin(), cond_e.end());
  const double med_e = median(cond_e);
  const double ratio_j = *std::max_element(cond_j.begin(), cond_j.end()) /
                         *std::min_element(cond_j.begin(), cond_j.end());
  const double spike_j =
      *std::max_element(err_j.begin(), err_j.end()) - median(err_j);
  const bool pass = peak_e >= 10.0 * med_e && ratio_j <= 2.0 && spike_j <= 3.0;
  report(3, "resonance-immunity", pass,
         fmt("efie cond peak %.0f vs median %.0f (>= 10x), csie-j cond "
             "max/min %.2f (<= 2), csie-j error spike %.2f dB (<= 3)",
             peak_e, med_e, ratio_j, spike_j));
}

void criterion_4() {
  // The agreement gate is 10x the production outer tolerance. The solves run
  // tighter than that so GMRES stopping error (amplified ~cond(op) ~ 20x on
  // the sphere) stays subdominant and the comparison measures the reduction.
  const double kMatch = 10 * 1e-4;
  const double kSolveTol = 1e-6;
  bool pass = true;
  std::string detail;

  struct Case {
    const char* name;
    Problem& p;
  };
  Problem cube_small(gen_cube(1.0, 1), 2.0, false);
  Case cases[] = {{"cube18", cube_small}, {"sphere480", sphere2()}};
  for (const auto& [name, p] : cases) {
    for (double alpha : {1.0, 10.0}) {
      FormulationConfig fc;
      fc.kind = FormulationKind::csie_j;
      fc.alpha = alpha;
      fc.inner_tol = 1e-8;
      fc.inner_max_iter = 500;
      const Eigen::VectorXcd i_j = p.solve(fc, kSolveTol);
      const auto sc_j = split_solution(fc, i_j, p.A, p.Ap);
      const FarFieldSet ff_j =
          far_field(p.basis, sc_j.electric, sc_j.magnetic, p.ctx, grid());

      fc.kind = FormulationKind::csie_jm;
      const Eigen::VectorXcd x_jm = p.solve(fc, kSolveTol);
      const auto sc_jm = split_solution(fc, x_jm, p.A, p.Ap);
      const FarFieldSet ff_jm =
          far_field(p.basis, sc_jm.electric, sc_jm.magnetic, p.ctx, grid());

      const double di = (sc_j.electric - sc_jm.electric).norm() /
                        sc_j.electric.norm();
      Eigen::VectorXcd dth = ff_j.e_theta - ff_jm.e_theta;
      Eigen::VectorXcd dph = ff_j.e_phi - ff_jm.e_phi;
      const double dff =
          std::sqrt(dth.squaredNorm() + dph.squaredNorm()) /
          std::sqrt(ff_j.e_theta.squaredNorm() + ff_j.e_phi.squaredNorm());

      // side condition residual of the recovered magnetic coefficients
      Eigen::VectorXcd lhs, rhs_v;
      spmul(p.Ap.mat, sc_j.magnetic, lhs);
      spmul(p.A.mat, sc_j.electric, rhs_v);
      rhs_v *= alpha * z0;
      const double side = (lhs - rhs_v).norm() / rhs_v.norm();

      const bool ok = di <= kMatch && dff <= kMatch && side <= 1e-6;
      pass = pass && ok;
      detail += fmt("%s a=%g: di %.1e dff %.1e side %.1e; ", name, alpha, di,
                    dff, side);
    }
  }
  report(4, "two-current-reduction", pass,
         detail + fmt("(gates: diffs <= %.0e, side <= 1e-6)", kMatch));
}

void criterion_5() {
  Problem& p = sphere2();
  FormulationConfig fc;
  fc.alpha = 10.0;
  fc.inner_tol = 1e-5;
  int it_e = 0, it_j = 0, it_jm = 0, it_c = 0;
  fc.kind = FormulationKind::efie;
  p.solve(fc, 1e-4, &it_e);
  fc.kind = FormulationKind::csie_j;
  p.solve(fc, 1e-4, &it_j);
  fc.kind = FormulationKind::csie_jm;
  p.solve(fc, 1e-4, &it_jm);
  fc.kind = FormulationKind::cfie;
  fc.cfie_comb = 0.5;
  p.solve(fc, 1e-4, &it_c);
  const bool pass = it_j < it_e && it_e < it_jm && it_c <= 1.5 * it_j;
  report(5, "iteration-ordering", pass,
         fmt("csie-j %d < efie %d < csie-jm %d and cfie(.5) %d <= 1.5x "
             "csie-j (tol 1e-4, a=10)",
             it_j, it_e, it_jm, it_c));
}

void criterion_6() {
  CgOptions co;
  co.tol = 5e-7;
  co.max_iter = 500;
  co.jacobi = true;

  // inner-vs-outer cost ratio of one problem: mean CG solve time against
  // mean dense matvec time, both cache-warm
  auto ratio_of = [&](const Problem& p, int* its, double* cg_ms,
                      double* dense_ms) {
    const int N = p.basis.size();
    Eigen::VectorXcd x = Eigen::VectorXcd::Random(N), y(N);
    const auto first = cg(p.Ap, x, co);
    if (its) *its = first.report.iterations;
    const int reps = 200;
    auto t0 = clk::now();
    for (int r = 0; r < reps; ++r) y.noalias() = p.ops.T * x;
    *dense_ms = secs(t0, clk::now()) * 1000 / reps;
    t0 = clk::now();
    for (int r = 0; r < reps; ++r) cg(p.Ap, x, co);
    *cg_ms = secs(t0, clk::now()) * 1000 / reps;
    return 100.0 * *cg_ms / *dense_ms;
  };

  Problem& p = sphere2();
  int its = 0;
  double cg_ms = 0, dense_ms = 0;
  const double share = ratio_of(p, &its, &cg_ms, &dense_ms);

  // the inner solve is O(N) against an O(N^2) dense application, so the
  // ratio falls with refinement; the coarser sphere shows the trend
  Problem coarse(gen_icosphere(1.0, 1), p.k0, false);
  int its1 = 0;
  double cg1_ms = 0, dense1_ms = 0;
  const double share1 = ratio_of(coarse, &its1, &cg1_ms, &dense1_ms);

  const bool pass = its <= 30 && share <= 5.0;
  report(6, "inner-solve-cost", pass,
         fmt("cg(A') tol 5e-7: %d iterations (<= 30); %.3f ms vs dense "
             "matvec %.3f ms at N=%d: %.1f%% (<= 5%%; N=%d runs at %.0f%%, "
             "the ratio falls as O(1/N))",
             its, cg_ms, dense_ms, p.basis.size(), share,
             coarse.basis.size(), share1));
}

void criterion_7() {
  bool pass = true;
  std::string detail;
  struct Named {
    const char* name;
    Mesh mesh;
  };
  const Named meshes[] = {{"cube1", gen_cube(1.0, 1)},
                          {"cube2", gen_cube(1.0, 2)},
                          {"cube4", gen_cube(1.0, 4)},
                          {"ico0", gen_icosphere(1.0, 0)},
                          {"ico1", gen_icosphere(1.0, 1)},
                          {"ico2", gen_icosphere(1.0, 2)}};
  for (const auto& [name, mesh] : meshes) {
    const RwgBasis basis(mesh);
    const int N = basis.size();
    const Eigen::MatrixXd A = Eigen::MatrixXd(assemble_gram_A(basis).mat);
    const Eigen::MatrixXd Ap = Eigen::MatrixXd(assemble_gram_Aprime(basis).mat);

    bool ok = (A + A.transpose()).cwiseAbs().maxCoeff() == 0.0 &&
              A.diagonal().cwiseAbs().maxCoeff() == 0.0 &&
              (Ap - Ap.transpose()).cwiseAbs().maxCoeff() == 0.0;
    for (int r = 0; r < N && ok; ++r) {
      ok = (A.row(r).array() != 0.0).count() == 4 &&
           (Ap.row(r).array() != 0.0).count() == 5;
    }
    double lambda_min = 0.0;
    if (ok && N <= 500) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ap);
      lambda_min = es.eigenvalues().minCoeff();
      ok = lambda_min > 0.0;
    }
    pass = pass && ok;
    detail += fmt("%s(N=%d)%s ", name, N, ok ? "" : " BAD");
  }
  report(7, "gram-structure", pass,
         detail + "(4 nnz/row skew zero-diag; 5 nnz/row SPD)");
}

void criterion_8() {
  // alpha = 0 collapses the combined-source operator onto the field operator
  Problem cube_small(gen_cube(1.0, 1), 2.0, false);
  FormulationConfig fc;
  fc.kind = FormulationKind::csie_j;
  fc.alpha = 0.0;
  fc.inner_tol = 1e-12;
  const auto op_j = cube_small.build(fc);
  fc.kind = FormulationKind::efie;
  const auto op_e = cube_small.build(fc);
  double op_diff = 0.0;
  Eigen::VectorXcd yj, ye;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXcd x =
        Eigen::VectorXcd::Random(cube_small.basis.size());
    op_j->apply(x, yj);
    op_e->apply(x, ye);
    op_diff = std::max(op_diff, (yj - ye).norm() / x.norm());
  }

  // comb limits of the combined field equation reproduce both parents
  Problem sphere_small(gen_icosphere(1.0, 1), 2.0, true);
  const double tol = 1e-8;
  FormulationConfig pc;
  pc.kind = FormulationKind::efie;
  const auto x_e = sphere_small.solve(pc, tol);
  pc.kind = FormulationKind::mfie;
  const auto x_m = sphere_small.solve(pc, tol);
  pc.kind = FormulationKind::cfie;
  pc.cfie_comb = 1.0;
  const auto x_c1 = sphere_small.solve(pc, tol);
  pc.cfie_comb = 0.0;
  const auto x_c0 = sphere_small.solve(pc, tol);
  const double d1 = (x_c1 - x_e).norm() / x_e.norm();
  const double d0 = (x_c0 - x_m).norm() / x_m.norm();

  const bool pass = op_diff <= 1e-12 && d1 <= 10 * tol && d0 <= 10 * tol;
  report(8, "limit-degeneration", pass,
         fmt("csie-j(a=0) vs efie apply %.1e (<= 1e-12); cfie(1) vs efie "
             "%.1e, cfie(0) vs mfie %.1e (<= %.0e)",
             op_diff, d1, d0, 10 * tol));
}

void criterion_9() {
  // just above the first interior resonance, where the field operator sags
  const double k0 = resonant_k() * 1.01;
  Problem p(gen_icosphere(1.0, 2), k0, false);
  const int N = p.basis.size();
  FormulationConfig fc;
  fc.kind = FormulationKind::efie;
  const Eigen::VectorXd se =
      singular_spectrum(p.build(fc)->materialize()).values;
  fc.kind = FormulationKind::csie_j;
  fc.alpha = 1.0;
  fc.inner_tol = 1e-7;
  const Eigen::VectorXd sj =
      singular_spectrum(p.build(fc)->materialize()).values;

  const int lo = static_cast<int>(0.3 * N), hi = static_cast<int>(0.7 * N);
  int holds = 0;
  for (int i = lo; i <= hi; ++i) holds += sj[i] >= se[i];
  const bool pass = holds == hi - lo + 1;
  report(9, "mid-spectrum-lift", pass,
         fmt("csie-j >= efie at %d/%d normalized indices in [0.3N, 0.7N] "
             "(k0 = %.3f, sigma at 0.7N: %.3f vs %.3f)",
             holds, hi - lo + 1, k0, sj[hi], se[hi]));
}

void criterion_10() {
  const SphereErrors& s = sphere3_errors();
  const CubeErrors& c = cube_errors();
  const auto [amin, amax] =
      std::minmax_element(s.csie.begin(), s.csie.end());
  const double alpha_spread = *amax - *amin;
  const auto [cmin, cmax] =
      std::minmax_element(c.cfie.begin(), c.cfie.end());
  const double comb_spread = *cmax - *cmin;
  const double sphere_comb_spread =
      *std::max_element(s.cfie.begin(), s.cfie.end()) -
      *std::min_element(s.cfie.begin(), s.cfie.end());
  const bool pass = alpha_spread <= 3.0 && comb_spread >= 6.0;
  report(10, "weighting-insensitivity", pass,
         fmt("csie-j error spread %.2f dB over alpha {0.5, 1, 2.7, 10} "
             "(<= 3); cube cfie spread %.2f dB over comb {0.2, 0.5, 0.9} "
             "(>= 6; smooth sphere %.2f for reference)",
             alpha_spread, comb_spread, sphere_comb_spread));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return selected.empty() || selected.count(id); };

  struct Entry {
    int id;
    void (*fn)();
  };
  const Entry entries[] = {{1, criterion_1}, {2, criterion_2},
                           {3, criterion_3}, {4, criterion_4},
                           {5, criterion_5}, {6, criterion_6},
                           {7, criterion_7}, {8, criterion_8},
                           {9, criterion_9}, {10, criterion_10}};
  const auto t0 = clk::now();
  for (const auto& e : entries) {
    if (!want(e.id)) continue;
    try {
      e.fn();
    } catch (const std::exception& ex) {
      report(e.id, "exception", false, ex.what());
    }
  }
  std::printf("%s (%d failed, %.0f s)\n", g_failures ? "FAILED" : "OK",
              g_failures, secs(t0, clk::now()));
  return g_failures ? 1 : 0;
}
