#pragma once

#include <vector>

#include "csmom/excitation.hpp"
#include "csmom/farfield.hpp"
#include "csmom/physics.hpp"

namespace csmom {

// Analytical scattering from a conducting sphere centered at the origin
// (Mie series, truncated at n_max = ceil(ka + 4 (ka)^{1/3} + 2) + extra).
// Same r-normalized far-field convention as far_field().
FarFieldSet mie_far_field(double diameter, const PhysicalContext& ctx,
                          const PlaneWave& pw,
                          const std::vector<Direction>& directions,
                          int extra_terms = 0);

// Series cross sections in m^2; equal for a lossless scatterer.
double mie_scattering_cross_section(double diameter, double k0,
                                    int extra_terms = 0);
double mie_extinction_cross_section(double diameter, double k0,
                                    int extra_terms = 0);
// Extinction recovered from the forward-scattering amplitude (optical
// theorem), evaluated through the full far-field path.
double mie_forward_extinction(double diameter, double k0, const PlaneWave& pw,
                              int extra_terms = 0);

// Interior mode of the conducting spherical cavity.
struct CavityMode {
  double x;             // root of the radial characteristic, ka
  double frequency_hz;  // x * c0 / (pi * diameter)
  int n;                // spherical harmonic order
  bool tm;              // true: root of d/dx[x j_n(x)]; false: root of j_n(x)
};

// First `count` interior resonances, ascending in frequency. Roots are
// bisected to 1e-12 relative.
std::vector<CavityMode> cavity_resonances(double diameter, int count);

}  // namespace csmom
