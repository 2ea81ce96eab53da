#include "csmom/excitation.hpp"

#include <cmath>
#include <stdexcept>

#include "csmom/quadrature.hpp"

namespace csmom {

PlaneWave::PlaneWave(const Eigen::Vector3d& k, const Eigen::Vector3d& p,
                     double e0)
    : k_hat(k), e_pol(p), amplitude(e0) {
  if (std::abs(k_hat.norm() - 1.0) > 1e-12 ||
      std::abs(e_pol.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("PlaneWave: direction vectors must be unit");
  }
  if (std::abs(k_hat.dot(e_pol)) > 1e-12) {
    throw std::invalid_argument("PlaneWave: polarization must be orthogonal to k");
  }
}

Eigen::Vector3cd incident_E(const PlaneWave& pw, double k0,
                            const Eigen::Vector3d& r) {
  double phase = k0 * pw.k_hat.dot(r);
  cplx factor = pw.amplitude * cplx(std::cos(phase),
                                    convention::greens_phase_sign * std::sin(phase));
  return pw.e_pol.cast<cplx>() * factor;
}

Eigen::Vector3cd incident_H(const PlaneWave& pw, double k0,
                            const Eigen::Vector3d& r) {
  Eigen::Vector3cd e = incident_E(pw, k0, r);
  return pw.k_hat.cast<cplx>().cross(e) / z0;
}

namespace {

template <typename Field>
Eigen::VectorXcd tested_rhs(const RwgBasis& basis, int rule_points,
                            const Field& field) {
  const Mesh& mesh = basis.mesh();
  const auto& rule = triangle_rule(rule_points);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(basis.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& idx = mesh.triangles[t];
    for (const auto& qp : rule) {
      Eigen::Vector3d r = map_to_triangle(qp, mesh.vertices[idx[0]],
                                          mesh.vertices[idx[1]],
                                          mesh.vertices[idx[2]]);
      Eigen::Vector3cd f = field(t, r);
      for (const auto& fn : basis.triangle_functions(t)) {
        // beta = sign*(l/2A)(r - v); the area cancels the rule normalization
        Eigen::Vector3d d = r - mesh.vertices[fn.free_vertex];
        rhs(fn.basis) += (qp.w * 0.5 * fn.sign * fn.length) *
                         d.cast<cplx>().dot(f);
      }
    }
  }
  return rhs;
}

}  // namespace

Eigen::VectorXcd rhs_efie(const RwgBasis& basis, const PlaneWave& pw, double k0,
                          int rule_points) {
  if (k0 <= 0.0) throw std::invalid_argument("rhs_efie: k0 must be positive");
  return convention::efie_rhs_sign *
         tested_rhs(basis, rule_points, [&](int, const Eigen::Vector3d& r) {
           return incident_E(pw, k0, r);
         });
}

Eigen::VectorXcd rhs_mfie(const RwgBasis& basis, const PlaneWave& pw, double k0,
                          int rule_points) {
  if (k0 <= 0.0) throw std::invalid_argument("rhs_mfie: k0 must be positive");
  const Mesh& mesh = basis.mesh();
  return convention::mfie_rhs_sign *
         tested_rhs(basis, rule_points, [&](int t, const Eigen::Vector3d& r) {
           Eigen::Vector3cd h = incident_H(pw, k0, r);
           return Eigen::Vector3cd(mesh.normals[t].cast<cplx>().cross(h));
         });
}

}  // namespace csmom
