#include "csmom/formulations.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "csmom/excitation.hpp"
#include "csmom/operators.hpp"

using namespace csmom;

namespace {

struct Assembled {
  RwgBasis basis;
  double k0;
  OperatorSet ops;
  SparseRealMatrix A, Ap;

  Assembled(Mesh mesh, double k) : basis(std::move(mesh)), k0(k) {
    QuadratureConfig quad;
    AssemblyRequest req;
    req.want_T = req.want_K_beta = req.want_K_nxbeta = true;
    ops = assemble_operators(basis, k0, quad, req);
    A = assemble_gram_A(basis);
    Ap = assemble_gram_Aprime(basis);
  }
};

// unit cube at a 2 m wavelength, the mesh-refinement study configuration
const Assembled& cube18() {
  static Assembled a(gen_cube(1.0, 1), pi);
  return a;
}

// unit-diameter sphere away from the first cavity resonance
const Assembled& sphere120() {
  static Assembled a(gen_icosphere(1.0, 1), 2.0);
  return a;
}

Eigen::VectorXcd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(dist(rng), dist(rng));
  return v;
}

Eigen::VectorXcd apply_op(const LinearOperator& op, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd y;
  op.apply(x, y);
  return y;
}

}  // namespace

TEST_CASE("electric operator is the scaled hypersingular matrix",
          "[formulations]") {
  const auto& a = cube18();
  auto op = build_efie(a.ops.T, a.k0);
  REQUIRE(op->size() == a.basis.size());
  Eigen::MatrixXcd expect = (jj * a.k0 * z0) * a.ops.T;
  REQUIRE((op->materialize() - expect).cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXcd x = random_vector(op->size(), 1);
  REQUIRE((apply_op(*op, x) - expect * x).norm() < 1e-13 * (expect * x).norm());
}

TEST_CASE("single-current operator with alpha 0 degenerates to the electric "
          "operator",
          "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 0.0;
  auto cs = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0);
  auto ef = build_efie(a.ops.T, a.k0);
  Eigen::VectorXcd x = random_vector(cs->size(), 2);
  REQUIRE((apply_op(*cs, x) - apply_op(*ef, x)).norm() == 0.0);
  REQUIRE((cs->materialize() - ef->materialize()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(cs->inner_stats().iterations == 0);
}

TEST_CASE("combined field limits reduce to the scaled constituents",
          "[formulations]") {
  const auto& a = cube18();
  Eigen::VectorXcd x = random_vector(a.basis.size(), 3);

  auto electric_limit = build_cfie(a.ops.T, a.Ap, a.ops.K_nxbeta, 1.0, a.k0);
  auto ef = build_efie(a.ops.T, a.k0);
  Eigen::VectorXcd lhs = apply_op(*electric_limit, x) * (jj * a.k0 * z0);
  REQUIRE((lhs - apply_op(*ef, x)).norm() < 1e-14 * lhs.norm());

  auto magnetic_limit = build_cfie(a.ops.T, a.Ap, a.ops.K_nxbeta, 0.0, a.k0);
  auto mf = build_mfie(a.Ap, a.ops.K_nxbeta);
  Eigen::VectorXcd rhs = apply_op(*mf, x) / (jj * a.k0);
  REQUIRE((apply_op(*magnetic_limit, x) - rhs).norm() < 1e-13 * rhs.norm());
}

TEST_CASE("combined field solution limits match the constituent solutions",
          "[formulations]") {
  const auto& a = cube18();
  PlaneWave pw(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0));
  Eigen::VectorXcd e = rhs_efie(a.basis, pw, a.k0);
  Eigen::VectorXcd h = rhs_mfie(a.basis, pw, a.k0);

  GmresOptions gopt;
  gopt.tol = 1e-10;
  gopt.max_iter = 200;

  FormulationConfig cfg;
  cfg.kind = FormulationKind::cfie;

  cfg.cfie_comb = 1.0;
  auto from_cfie =
      gmres(*build_cfie(a.ops.T, a.Ap, a.ops.K_nxbeta, 1.0, a.k0),
            formulation_rhs(cfg, a.k0, e, h), gopt);
  auto from_efie = gmres(*build_efie(a.ops.T, a.k0), e, gopt);
  REQUIRE(from_cfie.report.success());
  REQUIRE(from_efie.report.success());
  REQUIRE((from_cfie.x - from_efie.x).norm() <
          10.0 * gopt.tol * from_efie.x.norm());

  cfg.cfie_comb = 0.0;
  auto from_cfie0 =
      gmres(*build_cfie(a.ops.T, a.Ap, a.ops.K_nxbeta, 0.0, a.k0),
            formulation_rhs(cfg, a.k0, e, h), gopt);
  auto from_mfie = gmres(*build_mfie(a.Ap, a.ops.K_nxbeta), h, gopt);
  REQUIRE(from_cfie0.report.success());
  REQUIRE(from_mfie.report.success());
  REQUIRE((from_cfie0.x - from_mfie.x).norm() <
          10.0 * gopt.tol * from_mfie.x.norm());
}

TEST_CASE("single-current materialization matches a dense factorization",
          "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 10.0;
  auto op = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0);

  Eigen::MatrixXd Ad = Eigen::MatrixXd(a.A.mat);
  Eigen::MatrixXd Apd = Eigen::MatrixXd(a.Ap.mat);
  Eigen::MatrixXcd Y = Apd.fullPivLu().solve(Ad).cast<cplx>();
  Eigen::MatrixXcd oracle =
      (cfg.alpha * z0) * ((a.ops.K_beta - 0.5 * Ad.cast<cplx>()) * Y) +
      (jj * a.k0 * z0) * a.ops.T;
  Eigen::MatrixXcd m = op->materialize();
  REQUIRE((m - oracle).cwiseAbs().maxCoeff() <
          1e-10 * oracle.cwiseAbs().maxCoeff());

  // the nested-solve application reproduces the dense operator to inner_tol
  Eigen::VectorXcd x = random_vector(op->size(), 4);
  Eigen::VectorXcd direct = m * x;
  REQUIRE((apply_op(*op, x) - direct).norm() <
          10.0 * cfg.inner_tol * direct.norm());
}

TEST_CASE("single-current operator is linear to the inner tolerance",
          "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 1.0;
  cfg.inner_tol = 1e-6;
  auto op = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0);
  Eigen::VectorXcd x = random_vector(op->size(), 5);
  Eigen::VectorXcd y = random_vector(op->size(), 6);
  Eigen::VectorXcd lhs = apply_op(*op, x + y);
  Eigen::VectorXcd rhs = apply_op(*op, x) + apply_op(*op, y);
  double scale = std::max(lhs.norm(), rhs.norm());
  REQUIRE((lhs - rhs).norm() <= 10.0 * cfg.inner_tol * scale);
}

TEST_CASE("inner gram solves are counted and stay cheap", "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 1.0;
  cfg.inner_tol = 5e-7;
  auto op = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0);
  for (int trial = 0; trial < 4; ++trial) {
    apply_op(*op, random_vector(op->size(), 100 + trial));
  }
  auto stats = op->inner_stats();
  REQUIRE(stats.solves == 4);
  double mean = static_cast<double>(stats.iterations) / 4.0;
  REQUIRE(mean >= 3.0);
  REQUIRE(mean <= 20.0);
}

TEST_CASE("two-current and single-current solutions agree", "[formulations]") {
  const auto& a = cube18();
  PlaneWave pw(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0));
  Eigen::VectorXcd e = rhs_efie(a.basis, pw, a.k0);
  Eigen::VectorXcd h;

  FormulationConfig jm;
  jm.kind = FormulationKind::csie_jm;
  jm.alpha = 10.0;
  FormulationConfig js = jm;
  js.kind = FormulationKind::csie_j;
  js.inner_tol = 1e-9;

  GmresOptions gopt;
  gopt.tol = 1e-8;
  gopt.max_iter = 300;

  auto jm_op = build_csie_jm(a.ops.T, a.ops.K_beta, a.A, a.Ap, jm, a.k0);
  auto jm_sol = gmres(*jm_op, formulation_rhs(jm, a.k0, e, h), gopt);
  REQUIRE(jm_sol.report.success());
  auto jm_cur = split_solution(jm, jm_sol.x, a.A, a.Ap);

  auto j_op = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, js, a.k0);
  auto j_sol = gmres(*j_op, formulation_rhs(js, a.k0, e, h), gopt);
  REQUIRE(j_sol.report.success());
  auto j_cur = split_solution(js, j_sol.x, a.A, a.Ap);

  REQUIRE((jm_cur.electric - j_cur.electric).norm() <
          10.0 * gopt.tol * j_cur.electric.norm());
  REQUIRE((jm_cur.magnetic - j_cur.magnetic).norm() <
          10.0 * gopt.tol * j_cur.magnetic.norm());

  // the weak-form side condition holds at the two-current solution
  Eigen::MatrixXcd Ad = Eigen::MatrixXd(a.A.mat).cast<cplx>();
  Eigen::MatrixXcd Apd = Eigen::MatrixXd(a.Ap.mat).cast<cplx>();
  Eigen::VectorXcd side =
      Apd * jm_cur.magnetic - (jm.alpha * z0) * (Ad * jm_cur.electric);
  REQUIRE(side.norm() <= gopt.tol * (Apd * jm_cur.magnetic).norm() * 10.0);

  // weighting is an exact reparametrization
  FormulationConfig raw = jm;
  raw.jm_weighting = false;
  auto raw_op = build_csie_jm(a.ops.T, a.ops.K_beta, a.A, a.Ap, raw, a.k0);
  auto raw_sol = gmres(*raw_op, formulation_rhs(raw, a.k0, e, h), gopt);
  REQUIRE(raw_sol.report.success());
  auto raw_cur = split_solution(raw, raw_sol.x, a.A, a.Ap);
  REQUIRE((raw_cur.electric - jm_cur.electric).norm() <
          10.0 * gopt.tol * jm_cur.electric.norm());
  REQUIRE((raw_cur.magnetic - jm_cur.magnetic).norm() <
          10.0 * gopt.tol * jm_cur.magnetic.norm());
}

TEST_CASE("magnetic recovery satisfies the side condition", "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 2.5;
  cfg.inner_tol = 1e-5;

  REQUIRE(recover_magnetic(Eigen::VectorXcd::Zero(a.basis.size()), a.A, a.Ap,
                           cfg)
              .norm() == 0.0);

  Eigen::VectorXcd i = random_vector(a.basis.size(), 7);
  Eigen::VectorXcd v = recover_magnetic(i, a.A, a.Ap, cfg);
  Eigen::MatrixXcd Ad = Eigen::MatrixXd(a.A.mat).cast<cplx>();
  Eigen::MatrixXcd Apd = Eigen::MatrixXd(a.Ap.mat).cast<cplx>();
  Eigen::VectorXcd target = (cfg.alpha * z0) * (Ad * i);
  REQUIRE((Apd * v - target).norm() <= cfg.inner_tol / 10.0 * target.norm());
}

TEST_CASE("single-current system beats the two-current system on iterations",
          "[formulations]") {
  const auto& a = cube18();
  PlaneWave pw(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0));
  Eigen::VectorXcd e = rhs_efie(a.basis, pw, a.k0);
  Eigen::VectorXcd h;

  FormulationConfig jm;
  jm.kind = FormulationKind::csie_jm;
  jm.alpha = 10.0;
  FormulationConfig js = jm;
  js.kind = FormulationKind::csie_j;

  GmresOptions gopt;
  gopt.tol = 1e-4;
  gopt.max_iter = 200;

  auto jm_op = build_csie_jm(a.ops.T, a.ops.K_beta, a.A, a.Ap, jm, a.k0);
  auto jm_sol = gmres(*jm_op, formulation_rhs(jm, a.k0, e, h), gopt);
  auto j_op = build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, js, a.k0);
  auto j_sol = gmres(*j_op, formulation_rhs(js, a.k0, e, h), gopt);
  REQUIRE(jm_sol.report.success());
  REQUIRE(j_sol.report.success());
  REQUIRE(j_sol.report.iterations < jm_sol.report.iterations);
  REQUIRE(j_sol.report.inner_iterations > 0);
  REQUIRE(j_sol.report.mean_inner_per_matvec > 0.0);
}

TEST_CASE("magnetic formulation converges faster off resonance",
          "[formulations]") {
  const auto& a = sphere120();
  PlaneWave pw(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0));
  Eigen::VectorXcd e = rhs_efie(a.basis, pw, a.k0);
  Eigen::VectorXcd h = rhs_mfie(a.basis, pw, a.k0);

  GmresOptions gopt;
  gopt.tol = 1e-6;
  gopt.max_iter = 300;
  auto efie_sol = gmres(*build_efie(a.ops.T, a.k0), e, gopt);
  auto mfie_sol = gmres(*build_mfie(a.Ap, a.ops.K_nxbeta), h, gopt);
  REQUIRE(efie_sol.report.success());
  REQUIRE(mfie_sol.report.success());
  REQUIRE(mfie_sol.report.iterations < efie_sol.report.iterations);
}

TEST_CASE("diagonal preconditioners", "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_j;
  cfg.alpha = 10.0;

  Eigen::VectorXcd plain = efie_diag_precond(a.ops.T, a.k0);
  REQUIRE((plain - (jj * a.k0 * z0) * a.ops.T.diagonal()).norm() == 0.0);

  // applying the preconditioner to its own diagonal gives ones
  Eigen::VectorXcd x = plain;
  jacobi_preconditioner(plain)(x);
  REQUIRE((x - Eigen::VectorXcd::Ones(x.size())).norm() < 1e-14);

  FormulationConfig zero = cfg;
  zero.alpha = 0.0;
  REQUIRE((csie_diag_precond(a.ops.T, a.A, a.Ap, zero, a.k0) - plain).norm() ==
          0.0);

  // the magnetic contribution is real: A and A' carry no imaginary part
  Eigen::VectorXcd full = csie_diag_precond(a.ops.T, a.A, a.Ap, cfg, a.k0);
  REQUIRE((full - plain).imag().norm() == 0.0);
  REQUIRE((full - plain).real().norm() > 0.0);

  Eigen::VectorXcd jm =
      csie_jm_diag_precond(a.ops.T, a.Ap, cfg, a.k0);
  REQUIRE(jm.size() == 2 * a.basis.size());
  REQUIRE((jm.head(a.basis.size()) - plain).norm() == 0.0);
  REQUIRE((jm.tail(a.basis.size()) -
           (z0 * Eigen::VectorXd(a.Ap.mat.diagonal())).cast<cplx>())
              .norm() == 0.0);
}

TEST_CASE("plain diagonal preconditioning is neutral on a uniform sphere",
          "[formulations]") {
  // the hypersingular diagonal is nearly constant on a uniform mesh, so
  // jacobi acts as a scalar rescale: iteration counts move by at most a few
  // (measured +2 at N=120 and N=480) and the solution is unchanged
  const auto& a = sphere120();
  PlaneWave pw(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0));
  Eigen::VectorXcd e = rhs_efie(a.basis, pw, a.k0);

  GmresOptions bare;
  bare.tol = 1e-4;
  bare.max_iter = 300;
  GmresOptions jac = bare;
  jac.precond = jacobi_preconditioner(efie_diag_precond(a.ops.T, a.k0));

  auto op = build_efie(a.ops.T, a.k0);
  auto plain_sol = gmres(*op, e, bare);
  auto jac_sol = gmres(*op, e, jac);
  REQUIRE(plain_sol.report.success());
  REQUIRE(jac_sol.report.success());
  REQUIRE(std::abs(jac_sol.report.iterations - plain_sol.report.iterations) <=
          5);
  REQUIRE((jac_sol.x - plain_sol.x).norm() <
          10.0 * bare.tol * plain_sol.x.norm());
}

TEST_CASE("formulation names round trip", "[formulations]") {
  for (FormulationKind k :
       {FormulationKind::efie, FormulationKind::mfie, FormulationKind::cfie,
        FormulationKind::csie_jm, FormulationKind::csie_j}) {
    REQUIRE(formulation_from_string(to_string(k)) == k);
  }
  REQUIRE(formulation_from_string("CSIE_J") == FormulationKind::csie_j);
  REQUIRE_THROWS_AS(formulation_from_string("emie"), std::invalid_argument);
}

TEST_CASE("formulation input validation", "[formulations]") {
  const auto& a = cube18();
  FormulationConfig cfg;
  cfg.kind = FormulationKind::csie_jm;

  cfg.alpha = 0.0;
  REQUIRE_THROWS_AS(build_csie_jm(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0),
                    std::invalid_argument);
  cfg.alpha = -1.0;
  REQUIRE_THROWS_AS(build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0),
                    std::invalid_argument);
  cfg.alpha = 1.0;
  cfg.inner_tol = 0.0;
  REQUIRE_THROWS_AS(build_csie_j(a.ops.T, a.ops.K_beta, a.A, a.Ap, cfg, a.k0),
                    std::invalid_argument);

  REQUIRE_THROWS_AS(build_cfie(a.ops.T, a.Ap, a.ops.K_nxbeta, 1.5, a.k0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_efie(a.ops.T, 0.0), std::invalid_argument);

  Eigen::MatrixXcd bad = a.ops.T;
  bad(2, 2) = 0.0;
  REQUIRE_THROWS_AS(efie_diag_precond(bad, a.k0), std::invalid_argument);

  FormulationConfig ok;
  ok.kind = FormulationKind::cfie;
  REQUIRE_THROWS_AS(
      formulation_rhs(ok, a.k0, Eigen::VectorXcd::Zero(5), Eigen::VectorXcd()),
      std::invalid_argument);
}
