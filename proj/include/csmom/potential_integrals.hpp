#pragma once

#include <Eigen/Dense>

namespace csmom {

// Closed-form integrals of the static kernel over a flat triangle with
// constant and linear source densities, evaluated at an arbitrary
// observation point r:
//   one_over_r      = int_T 1/R ds'
//   grad_one_over_r = grad_r int_T 1/R ds'
//   linear_over_r   = int_T (r' - rho)/R ds'   (rho = projection of r)
// R = |r - r'|. Valid for r on, near, or far from the triangle; the only
// excluded case is r exactly on an edge line segment, which the assembly
// never samples (observation points are strictly interior to triangles).
struct TrianglePotentials {
  double one_over_r = 0.0;
  Eigen::Vector3d grad_one_over_r = Eigen::Vector3d::Zero();
  Eigen::Vector3d linear_over_r = Eigen::Vector3d::Zero();
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();
  double height = 0.0;  // signed distance of r from the triangle plane
};

TrianglePotentials triangle_potentials(const Eigen::Vector3d& v0,
                                       const Eigen::Vector3d& v1,
                                       const Eigen::Vector3d& v2,
                                       const Eigen::Vector3d& unit_normal,
                                       const Eigen::Vector3d& r);

}  // namespace csmom
