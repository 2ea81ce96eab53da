#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace csmom {

// Closed, consistently outward-oriented triangle surface mesh.
// Invariants established by finalize_mesh (used by all constructors):
//   - every undirected edge is shared by exactly two triangles,
//   - triangle windings are consistent (each directed edge appears once),
//   - normals point outward (signed volume > 0),
//   - V - E + F == 2,
//   - edges are sorted lexicographically by their (lo, hi) vertex pair.
struct Mesh {
  struct Edge {
    int v0, v1;        // v0 < v1
    int tri_plus;      // traverses v0 -> v1 in its winding
    int tri_minus;     // traverses v1 -> v0
    double length;
  };

  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;

  // derived by finalize_mesh
  std::vector<double> areas;
  std::vector<Eigen::Vector3d> normals;
  std::vector<Eigen::Vector3d> centroids;
  std::vector<Edge> edges;
  double mean_edge_length = 0.0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  double signed_volume() const;
};

// Validates and completes a raw vertex/triangle soup: repairs inconsistent
// windings (orientation propagation over the dual graph), flips globally so
// normals point outward, and fills the derived fields. Throws
// std::runtime_error with a descriptive message when the surface is not a
// connected closed orientable 2-manifold of genus zero.
Mesh finalize_mesh(std::vector<Eigen::Vector3d> vertices,
                   std::vector<std::array<int, 3>> triangles);

// Axis-aligned cube centered at the origin; each face is a divisions x
// divisions grid of squares, each split into two triangles.
Mesh gen_cube(double edge_len, int divisions);

// Icosahedron subdivided `subdivisions` times, vertices projected onto the
// sphere of the given diameter, centered at the origin.
Mesh gen_icosphere(double diameter, int subdivisions);

// ASCII OFF. Loading accepts arbitrary winding (repaired on build).
Mesh load_off(const std::string& path);
void save_off(const Mesh& mesh, const std::string& path);

struct MeshQualityReport {
  int vertex_count = 0;
  int triangle_count = 0;
  int edge_count = 0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  double mean_edge = 0.0;
  // populated when k0 > 0
  double min_edge_over_lambda = 0.0;
  double max_edge_over_lambda = 0.0;
  double mean_edge_over_lambda = 0.0;
};

MeshQualityReport mesh_quality(const Mesh& mesh, double k0 = 0.0);
void write_quality_csv(const MeshQualityReport& report, const std::string& path);

}  // namespace csmom
