#pragma once

#include <Eigen/Dense>

#include "csmom/physics.hpp"
#include "csmom/rwg.hpp"

namespace csmom {

// Linearly polarized plane wave E = E0 p e^{-j k0 khat.r}, H = (1/Z0) khat x E.
struct PlaneWave {
  Eigen::Vector3d k_hat;
  Eigen::Vector3d e_pol;
  double amplitude;

  PlaneWave(const Eigen::Vector3d& k, const Eigen::Vector3d& p,
            double e0 = 1.0);
};

Eigen::Vector3cd incident_E(const PlaneWave& pw, double k0,
                            const Eigen::Vector3d& r);
Eigen::Vector3cd incident_H(const PlaneWave& pw, double k0,
                            const Eigen::Vector3d& r);

// Tested excitation vectors. EFIE: e_m = int beta_m . E_inc ds.
// MFIE: h_m = int beta_m . (n x H_inc) ds, the pairing that matches the
// (A'/2 + K) operator convention of the formulations module.
Eigen::VectorXcd rhs_efie(const RwgBasis& basis, const PlaneWave& pw, double k0,
                          int rule_points = 7);
Eigen::VectorXcd rhs_mfie(const RwgBasis& basis, const PlaneWave& pw, double k0,
                          int rule_points = 7);

}  // namespace csmom
