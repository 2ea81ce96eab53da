#include "csmom/rwg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "csmom/quadrature.hpp"

namespace csmom {

namespace {

int opposite_vertex(const std::array<int, 3>& tri, int a, int b) {
  for (int v : tri) {
    if (v != a && v != b) return v;
  }
  throw std::logic_error("rwg: edge vertices not found in triangle");
}

}  // namespace

RwgBasis::RwgBasis(Mesh mesh) : mesh_(std::move(mesh)) {
  const int ne = mesh_.edge_count();
  fns_.reserve(ne);
  tri_fns_.assign(mesh_.triangle_count(), {});
  for (int n = 0; n < ne; ++n) {
    const auto& e = mesh_.edges[n];
    Fn f;
    f.tri_plus = e.tri_plus;
    f.tri_minus = e.tri_minus;
    f.free_plus = opposite_vertex(mesh_.triangles[e.tri_plus], e.v0, e.v1);
    f.free_minus = opposite_vertex(mesh_.triangles[e.tri_minus], e.v0, e.v1);
    f.length = e.length;
    fns_.push_back(f);
    tri_fns_[e.tri_plus].push_back({n, +1.0, f.free_plus, f.length});
    tri_fns_[e.tri_minus].push_back({n, -1.0, f.free_minus, f.length});
  }
  for (const auto& fns : tri_fns_) {
    if (fns.size() != 3) throw std::logic_error("rwg: triangle without 3 bases");
  }
}

Eigen::Vector3d RwgBasis::eval(int n, int tri, const Eigen::Vector3d& r) const {
  const Fn& f = fns_[n];
  double sign;
  int free_v;
  if (tri == f.tri_plus) {
    sign = +1.0;
    free_v = f.free_plus;
  } else if (tri == f.tri_minus) {
    sign = -1.0;
    free_v = f.free_minus;
  } else {
    return Eigen::Vector3d::Zero();
  }
  double coef = sign * f.length / (2.0 * mesh_.areas[tri]);
  return coef * (r - mesh_.vertices[free_v]);
}

double RwgBasis::divergence(int n, int tri) const {
  const Fn& f = fns_[n];
  if (tri == f.tri_plus) return f.length / mesh_.areas[tri];
  if (tri == f.tri_minus) return -f.length / mesh_.areas[tri];
  return 0.0;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// int_t beta_a . M(beta_b) ds with a 3-point rule (exact for the quadratic
// integrand); M is identity or n-cross.
template <typename Map>
double gram_entry(const RwgBasis& basis, int tri, const RwgBasis::LocalFn& fa,
                  const RwgBasis::LocalFn& fb, Map&& mapper) {
  const Mesh& mesh = basis.mesh();
  const auto& t = mesh.triangles[tri];
  const auto& v0 = mesh.vertices[t[0]];
  const auto& v1 = mesh.vertices[t[1]];
  const auto& v2 = mesh.vertices[t[2]];
  const double area = mesh.areas[tri];
  const Eigen::Vector3d& va = mesh.vertices[fa.free_vertex];
  const Eigen::Vector3d& vb = mesh.vertices[fb.free_vertex];
  const double ca = fa.sign * fa.length / (2.0 * area);
  const double cb = fb.sign * fb.length / (2.0 * area);
  double acc = 0.0;
  for (const auto& q : triangle_rule(3)) {
    Eigen::Vector3d r = map_to_triangle(q, v0, v1, v2);
    acc += q.w * (r - va).dot(mapper(r - vb));
  }
  return acc * ca * cb * area;
}

}  // namespace

SparseRealMatrix assemble_gram_A(const RwgBasis& basis) {
  const int n = basis.size();
  std::vector<Triplet> trip;
  trip.reserve(8 * n);
  for (int tri = 0; tri < basis.mesh().triangle_count(); ++tri) {
    const auto& fns = basis.triangle_functions(tri);
    const Eigen::Vector3d& nrm = basis.mesh().normals[tri];
    for (size_t a = 0; a < fns.size(); ++a) {
      for (size_t b = a + 1; b < fns.size(); ++b) {
        double val = gram_entry(basis, tri, fns[a], fns[b],
                                [&nrm](const Eigen::Vector3d& u) {
                                  return Eigen::Vector3d(nrm.cross(u));
                                });
        // beta_m.(n x beta_n) = -beta_n.(n x beta_m) pointwise; storing the
        // negation keeps the matrix exactly skew-symmetric in floating point.
        trip.emplace_back(fns[a].basis, fns[b].basis, val);
        trip.emplace_back(fns[b].basis, fns[a].basis, -val);
      }
    }
  }
  SparseRealMatrix out;
  out.symmetry = GramSymmetry::skew;
  out.mat.resize(n, n);
  out.mat.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseRealMatrix assemble_gram_Aprime(const RwgBasis& basis) {
  const int n = basis.size();
  std::vector<Triplet> trip;
  trip.reserve(10 * n);
  auto ident = [](const Eigen::Vector3d& u) { return u; };
  for (int tri = 0; tri < basis.mesh().triangle_count(); ++tri) {
    const auto& fns = basis.triangle_functions(tri);
    for (size_t a = 0; a < fns.size(); ++a) {
      trip.emplace_back(fns[a].basis, fns[a].basis,
                        gram_entry(basis, tri, fns[a], fns[a], ident));
      for (size_t b = a + 1; b < fns.size(); ++b) {
        double val = gram_entry(basis, tri, fns[a], fns[b], ident);
        trip.emplace_back(fns[a].basis, fns[b].basis, val);
        trip.emplace_back(fns[b].basis, fns[a].basis, val);
      }
    }
  }
  SparseRealMatrix out;
  out.symmetry = GramSymmetry::symmetric;
  out.mat.resize(n, n);
  out.mat.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void write_matrix_market(const SparseRealMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("rwg: cannot write '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% symmetry: "
      << (m.symmetry == GramSymmetry::skew ? "skew-symmetric" : "symmetric")
      << " (stored fully)\n";
  out.precision(17);
  out << m.mat.rows() << " " << m.mat.cols() << " " << m.mat.nonZeros() << "\n";
  for (int k = 0; k < m.mat.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.mat, k); it; ++it) {
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
    }
  }
}

}  // namespace csmom
