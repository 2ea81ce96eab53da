#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "csmom/mesh.hpp"

namespace csmom {

// Edge-based divergence-conforming basis on a closed mesh, one function per
// edge in the classical l/(2A) normalization. Unknown ordering follows the
// mesh edge ordering (lexicographic by vertex pair), so N == edge count.
class RwgBasis {
 public:
  struct Fn {
    int tri_plus, tri_minus;
    int free_plus, free_minus;  // vertex opposite the edge in each triangle
    double length;
  };
  // One basis function restricted to a triangle: beta(r) = sign*(l/2A)(r - v_free).
  struct LocalFn {
    int basis;
    double sign;  // +1 on its plus triangle, -1 on minus
    int free_vertex;
    double length;
  };

  explicit RwgBasis(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(fns_.size()); }
  const std::vector<Fn>& functions() const { return fns_; }
  // Exactly three entries per triangle on a closed mesh, ordered by basis index.
  const std::vector<LocalFn>& triangle_functions(int tri) const {
    return tri_fns_[tri];
  }

  // Value of basis n at a point lying on triangle `tri`; zero if n is not
  // supported there.
  Eigen::Vector3d eval(int n, int tri, const Eigen::Vector3d& r) const;
  // Surface divergence of basis n on triangle `tri` (+-l/A), zero off support.
  double divergence(int n, int tri) const;

 private:
  Mesh mesh_;
  std::vector<Fn> fns_;
  std::vector<std::vector<LocalFn>> tri_fns_;
};

enum class GramSymmetry { skew, symmetric };

struct SparseRealMatrix {
  Eigen::SparseMatrix<double> mat;
  GramSymmetry symmetry = GramSymmetry::symmetric;
};

// A_mn  = int beta_m . (n x beta_n) ds : skew-symmetric, zero diagonal,
//         exactly 4 structural nonzeros per row on a closed mesh.
// A'_mn = int beta_m . beta_n ds : SPD, exactly 5 structural nonzeros per row.
// Both are exact (3-point rule on quadratic integrands) and exactly
// skew/symmetric by construction.
SparseRealMatrix assemble_gram_A(const RwgBasis& basis);
SparseRealMatrix assemble_gram_Aprime(const RwgBasis& basis);

void write_matrix_market(const SparseRealMatrix& m, const std::string& path);

}  // namespace csmom
