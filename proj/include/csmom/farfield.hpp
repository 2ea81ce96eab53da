#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "csmom/excitation.hpp"
#include "csmom/physics.hpp"
#include "csmom/rwg.hpp"

namespace csmom {

// Observation direction in standard spherical angles, radians.
struct Direction {
  double theta;
  double phi;
};

// Scattered far field with the e^{-j k0 r}/r factor removed:
//   E_s(r) ~ [E_theta(r^) th^ + E_phi(r^) ph^] e^{-j k0 r}/r.
struct FarFieldSet {
  std::vector<Direction> directions;
  Eigen::VectorXcd e_theta;
  Eigen::VectorXcd e_phi;
  // provenance, carried into CSV headers
  std::string label;
  double alpha = 0.0;
  double frequency_hz = 0.0;
  std::string mesh_id;
  int unknowns = 0;
};

// Uniform (theta, phi) grid with the given angular step; each pole appears
// once. The 10 degree default yields 614 directions.
std::vector<Direction> direction_grid(double step_deg = 10.0);

// Far-zone radiation integrals of the expanded electric current i and
// magnetic current v, 3-point rule per triangle. Pass an empty v when only
// the electric current radiates.
FarFieldSet far_field(const RwgBasis& basis, const Eigen::VectorXcd& i,
                      const Eigen::VectorXcd& v, const PhysicalContext& ctx,
                      const std::vector<Direction>& directions);

// Bistatic RCS per direction: 10*log10(sigma / 1 m^2) with
// sigma = 4 pi (|E_theta|^2 + |E_phi|^2) / E0^2.
Eigen::VectorXd bistatic_rcs(const FarFieldSet& ff, const PlaneWave& pw);

// 20*log10(||test - ref|| / ||ref||), 2-norm over all directions and both
// polarizations, floored at -200 dB. The two grids must coincide.
double farfield_error_db(const FarFieldSet& test, const FarFieldSet& ref);

void write_farfield_csv(const FarFieldSet& ff, const std::string& path);
void write_rcs_csv(const FarFieldSet& ff, const PlaneWave& pw,
                   const std::string& path);

}  // namespace csmom
