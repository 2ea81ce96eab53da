#include "csmom/farfield.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "csmom/quadrature.hpp"

namespace csmom {

namespace {

cplx dot3(const Eigen::Vector3d& u, const Eigen::Vector3cd& f) {
  return u.x() * f.x() + u.y() * f.y() + u.z() * f.z();
}

Eigen::Vector3cd cross3(const Eigen::Vector3d& u, const Eigen::Vector3cd& f) {
  return {u.y() * f.z() - u.z() * f.y(), u.z() * f.x() - u.x() * f.z(),
          u.x() * f.y() - u.y() * f.x()};
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::scientific << std::setprecision(16);
  return out;
}

}  // namespace

std::vector<Direction> direction_grid(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 90.0)
    throw std::invalid_argument("grid step must be in (0, 90] degrees");
  const double step = step_deg * pi / 180.0;
  const int n_theta = static_cast<int>(std::round(180.0 / step_deg));
  const int n_phi = static_cast<int>(std::round(360.0 / step_deg));
  std::vector<Direction> dirs;
  for (int it = 0; it <= n_theta; ++it) {
    const double theta = std::min(pi, it * step);
    if (it == 0 || it == n_theta) {
      dirs.push_back({theta, 0.0});  // poles once
      continue;
    }
    for (int ip = 0; ip < n_phi; ++ip) dirs.push_back({theta, ip * step});
  }
  return dirs;
}

FarFieldSet far_field(const RwgBasis& basis, const Eigen::VectorXcd& i,
                      const Eigen::VectorXcd& v, const PhysicalContext& ctx,
                      const std::vector<Direction>& directions) {
  const int n = basis.size();
  if (i.size() != n)
    throw std::invalid_argument("electric coefficient size mismatch");
  const bool has_m = v.size() != 0;
  if (has_m && v.size() != n)
    throw std::invalid_argument("magnetic coefficient size mismatch");
  if (ctx.k0 <= 0.0) throw std::invalid_argument("k0 must be positive");
  if (directions.empty()) throw std::invalid_argument("no directions");

  // Current samples with the quadrature weight folded in, so each radiation
  // integral is a plain phase-weighted sum.
  const Mesh& mesh = basis.mesh();
  const auto& rule = triangle_rule(3);
  struct Sample {
    Eigen::Vector3d r;
    Eigen::Vector3cd j, m;
  };
  std::vector<Sample> samples;
  samples.reserve(mesh.triangle_count() * rule.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector3d& p0 = mesh.vertices[tri[0]];
    const Eigen::Vector3d& p1 = mesh.vertices[tri[1]];
    const Eigen::Vector3d& p2 = mesh.vertices[tri[2]];
    const double area = mesh.areas[t];
    for (const auto& qp : rule) {
      Sample s;
      s.r = map_to_triangle(qp, p0, p1, p2);
      s.j.setZero();
      s.m.setZero();
      for (const auto& fn : basis.triangle_functions(t)) {
        const Eigen::Vector3d beta = fn.sign * (fn.length / (2.0 * area)) *
                                     (s.r - mesh.vertices[fn.free_vertex]);
        const Eigen::Vector3cd wb = (qp.w * area) * beta.cast<cplx>();
        s.j += i(fn.basis) * wb;
        if (has_m) s.m += v(fn.basis) * wb;
      }
      samples.push_back(s);
    }
  }

  const int nd = static_cast<int>(directions.size());
  FarFieldSet ff;
  ff.directions = directions;
  ff.e_theta.resize(nd);
  ff.e_phi.resize(nd);
  ff.frequency_hz = ctx.frequency_hz;
  ff.unknowns = n;

  const double k0 = ctx.k0;
  const cplx ce = -jj * k0 * z0 / (4.0 * pi);
  const cplx cm = jj * k0 / (4.0 * pi);
  for (int d = 0; d < nd; ++d) {
    const double st = std::sin(directions[d].theta);
    const double ct = std::cos(directions[d].theta);
    const double sp = std::sin(directions[d].phi);
    const double cp = std::cos(directions[d].phi);
    const Eigen::Vector3d rhat(st * cp, st * sp, ct);

    Eigen::Vector3cd ij = Eigen::Vector3cd::Zero();
    Eigen::Vector3cd im = Eigen::Vector3cd::Zero();
    for (const auto& s : samples) {
      const double ph = k0 * rhat.dot(s.r);
      const cplx e(std::cos(ph), std::sin(ph));  // e^{+j k0 r^.r'}
      ij += e * s.j;
      if (has_m) im += e * s.m;
    }

    Eigen::Vector3cd f = ce * (ij - dot3(rhat, ij) * rhat.cast<cplx>());
    if (has_m) f += cm * cross3(rhat, im);

    const Eigen::Vector3d th(ct * cp, ct * sp, -st);
    const Eigen::Vector3d phv(-sp, cp, 0.0);
    ff.e_theta(d) = dot3(th, f);
    ff.e_phi(d) = dot3(phv, f);
  }
  return ff;
}

Eigen::VectorXd bistatic_rcs(const FarFieldSet& ff, const PlaneWave& pw) {
  if (pw.amplitude == 0.0) throw std::invalid_argument("zero amplitude");
  const double e0sq = pw.amplitude * pw.amplitude;
  Eigen::VectorXd out(ff.directions.size());
  for (int d = 0; d < out.size(); ++d) {
    const double sigma =
        4.0 * pi * (std::norm(ff.e_theta(d)) + std::norm(ff.e_phi(d))) / e0sq;
    out(d) = 10.0 * std::log10(std::max(sigma, 1e-40));  // keep nulls finite
  }
  return out;
}

double farfield_error_db(const FarFieldSet& test, const FarFieldSet& ref) {
  if (test.directions.size() != ref.directions.size())
    throw std::invalid_argument("direction grids differ");
  for (size_t d = 0; d < ref.directions.size(); ++d) {
    if (std::abs(test.directions[d].theta - ref.directions[d].theta) > 1e-12 ||
        std::abs(test.directions[d].phi - ref.directions[d].phi) > 1e-12)
      throw std::invalid_argument("direction grids differ");
  }
  const double rn =
      std::sqrt(ref.e_theta.squaredNorm() + ref.e_phi.squaredNorm());
  if (rn == 0.0) throw std::invalid_argument("zero reference field");
  const double dn = std::sqrt((test.e_theta - ref.e_theta).squaredNorm() +
                              (test.e_phi - ref.e_phi).squaredNorm());
  if (dn == 0.0) return -200.0;
  return std::max(-200.0, 20.0 * std::log10(dn / rn));
}

void write_farfield_csv(const FarFieldSet& ff, const std::string& path) {
  auto out = open_csv(path);
  out << "# label=" << ff.label << " alpha=" << ff.alpha
      << " frequency_hz=" << ff.frequency_hz << " mesh=" << ff.mesh_id
      << " n=" << ff.unknowns << "\n";
  out << "theta_deg,phi_deg,re_Etheta,im_Etheta,re_Ephi,im_Ephi\n";
  for (size_t d = 0; d < ff.directions.size(); ++d) {
    out << ff.directions[d].theta * 180.0 / pi << ','
        << ff.directions[d].phi * 180.0 / pi << ',' << ff.e_theta(d).real()
        << ',' << ff.e_theta(d).imag() << ',' << ff.e_phi(d).real() << ','
        << ff.e_phi(d).imag() << '\n';
  }
}

void write_rcs_csv(const FarFieldSet& ff, const PlaneWave& pw,
                   const std::string& path) {
  const Eigen::VectorXd sigma = bistatic_rcs(ff, pw);
  auto out = open_csv(path);
  out << "theta_deg,phi_deg,sigma_dbsm\n";
  for (size_t d = 0; d < ff.directions.size(); ++d) {
    out << ff.directions[d].theta * 180.0 / pi << ','
        << ff.directions[d].phi * 180.0 / pi << ',' << sigma(d) << '\n';
  }
}

}  // namespace csmom
