#include "csmom/potential_integrals.hpp"

#include <cmath>

namespace csmom {

// Edge-sum formulas for potential integrals of constant and linear densities
// over flat polygons, specialized to triangles. Per edge with unit tangent s,
// outward in-plane normal m = s x n, signed perpendicular distance P from the
// projected observation point, endpoint parameters l-, l+ and distances R-, R+:
//   int 1/R        = sum_i [ P_i f_i - |d| beta_i ]
//   grad int 1/R   = - sum_i f_i m_i - sgn(d) (sum_i beta_i) n
//   int (r'-rho)/R = 1/2 sum_i m_i [ R0_i^2 f_i + l+ R+ - l- R- ]
// f_i is the edge log term and beta_i the arctangent pair; R0^2 = P^2 + d^2.
TrianglePotentials triangle_potentials(const Eigen::Vector3d& v0,
                                       const Eigen::Vector3d& v1,
                                       const Eigen::Vector3d& v2,
                                       const Eigen::Vector3d& n,
                                       const Eigen::Vector3d& r) {
  TrianglePotentials out;
  const double d = n.dot(r - v0);
  out.height = d;
  out.rho = r - d * n;
  const double ad = std::abs(d);

  const Eigen::Vector3d* verts[3] = {&v0, &v1, &v2};
  const double scale2 = ((v1 - v0).squaredNorm() + (v2 - v1).squaredNorm() +
                         (v0 - v2).squaredNorm());
  const double tiny2 = 1e-28 * scale2;

  double beta_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& a = *verts[i];
    const Eigen::Vector3d& b = *verts[(i + 1) % 3];
    Eigen::Vector3d s = b - a;
    const double len = s.norm();
    s /= len;
    const Eigen::Vector3d m = s.cross(n);
    const double lm = (a - out.rho).dot(s);
    const double lp = lm + len;
    const double P = (a - out.rho).dot(m);
    const double R0sq = P * P + d * d;
    const double Rm = std::sqrt(R0sq + lm * lm);
    const double Rp = std::sqrt(R0sq + lp * lp);

    double f = 0.0;
    if (R0sq > tiny2) {
      // the two forms are algebraically equal; pick the cancellation-free one
      f = (lm + lp >= 0.0) ? std::log((Rp + lp) / (Rm + lm))
                           : std::log((Rm - lm) / (Rp - lp));
      const double bp = std::atan(P * lp / (R0sq + ad * Rp));
      const double bm = std::atan(P * lm / (R0sq + ad * Rm));
      out.one_over_r += P * f - ad * (bp - bm);
      beta_sum += bp - bm;
    } else if (lm + lp >= 0.0 ? (Rm + lm) > 0.0 : (Rp - lp) > 0.0) {
      // observation on the edge line but off the segment: P f -> 0, beta -> 0
      f = (lm + lp >= 0.0) ? std::log((Rp + lp) / (Rm + lm))
                           : std::log((Rm - lm) / (Rp - lp));
    }
    out.grad_one_over_r -= f * m;
    out.linear_over_r += 0.5 * (R0sq * f + lp * Rp - lm * Rm) * m;
  }
  const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  out.grad_one_over_r -= sgn * beta_sum * n;
  return out;
}

}  // namespace csmom
