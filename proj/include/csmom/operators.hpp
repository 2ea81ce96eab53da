#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

#include "csmom/physics.hpp"
#include "csmom/rwg.hpp"

namespace csmom {

struct QuadratureConfig {
  int far_points = 3;
  int near_points = 7;
  // triangle pairs closer than this multiple of the mean edge length (by
  // centroid distance) take the extraction path
  double near_threshold_factor = 2.0;
  // 1 extracts the static 1/(4 pi R) kernel term; 2 additionally removes the
  // constant -jk/(4 pi) term from the T remainder. K is unaffected by the
  // second term (a constant has zero gradient).
  int extraction_order = 1;
};

enum class KTesting { beta, n_cross_beta };

struct AssemblyRequest {
  bool want_T = false;
  bool want_K_beta = false;
  bool want_K_nxbeta = false;
};

struct OperatorSet {
  Eigen::MatrixXcd T;  // each left empty unless requested
  Eigen::MatrixXcd K_beta;
  Eigen::MatrixXcd K_nxbeta;
};

// e^{-j k0 R} / (4 pi R); k0 = 0 gives the static kernel
cplx greens(const Eigen::Vector3d& r, const Eigen::Vector3d& rp, double k0);

// One triangle-pair sweep filling every requested matrix. Entries are
// bit-identical whether matrices are assembled together or separately, and
// across repeated runs with the same inputs.
OperatorSet assemble_operators(const RwgBasis& basis, double k0,
                               const QuadratureConfig& quad,
                               const AssemblyRequest& request);

Eigen::MatrixXcd assemble_T(const RwgBasis& basis, double k0,
                            const QuadratureConfig& quad);
Eigen::MatrixXcd assemble_K(const RwgBasis& basis, double k0,
                            const QuadratureConfig& quad, KTesting testing);

// Little-endian dump: "CSMM" magic, u32 version, u64 rows, u64 cols, then
// row-major (re, im) double pairs.
void save_matrix(const std::string& path, const Eigen::MatrixXcd& mat);
Eigen::MatrixXcd load_matrix(const std::string& path);

// FNV-1a over mesh geometry, wavenumber, quadrature settings and a kind tag;
// stable across runs on one platform.
std::uint64_t operator_cache_key(const Mesh& mesh, double k0,
                                 const QuadratureConfig& quad,
                                 std::string_view kind);

}  // namespace csmom
