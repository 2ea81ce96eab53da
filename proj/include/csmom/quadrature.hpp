#pragma once

#include <Eigen/Dense>
#include <vector>

namespace csmom {

// Symmetric Gauss rules on the reference triangle in barycentric form.
// Weights are normalized to sum to 1; physical integrals scale by the area.
struct TriQuadPoint {
  double b0, b1, b2;  // barycentric coordinates
  double w;           // normalized weight
};

// Supported point counts: 1, 3, 6, 7, 12 (polynomial degrees 1, 2, 4, 5, 6).
const std::vector<TriQuadPoint>& triangle_rule(int points);

// Physical quadrature point r = b0*v0 + b1*v1 + b2*v2.
inline Eigen::Vector3d map_to_triangle(const TriQuadPoint& q,
                                       const Eigen::Vector3d& v0,
                                       const Eigen::Vector3d& v1,
                                       const Eigen::Vector3d& v2) {
  return q.b0 * v0 + q.b1 * v1 + q.b2 * v2;
}

}  // namespace csmom
