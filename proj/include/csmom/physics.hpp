#pragma once

#include <cmath>
#include <complex>

namespace csmom {

using cplx = std::complex<double>;

inline constexpr double c0 = 299792458.0;       // vacuum speed of light, m/s
inline constexpr double z0 = 376.730313668;     // vacuum wave impedance, Ohm
inline constexpr double pi = 3.14159265358979323846;

// Sign conventions, kept in one place so a single flip cannot pass unnoticed:
// the Green's kernel phase, the electric-field RHS sign, and the rotated
// magnetic-field RHS sign must stay consistent with each other and with the
// far-field oracle. Time convention is exp(+j w t), outgoing waves exp(-j k r).
namespace convention {
inline constexpr double greens_phase_sign = -1.0;  // exp(greens_phase_sign * j k R)
inline constexpr double efie_rhs_sign = +1.0;      // e_m = sign * int beta_m . E_inc
inline constexpr double mfie_rhs_sign = +1.0;      // h_m = sign * int beta_m . (n x H_inc)
}  // namespace convention

// Frequency-derived quantities used across assembly and postprocessing.
struct PhysicalContext {
  double frequency_hz = 0.0;
  double k0 = 0.0;       // rad/m
  double wavelength = 0.0;

  static PhysicalContext from_frequency(double f_hz) {
    PhysicalContext ctx;
    ctx.frequency_hz = f_hz;
    ctx.k0 = 2.0 * pi * f_hz / c0;
    ctx.wavelength = c0 / f_hz;
    return ctx;
  }

  static PhysicalContext from_wavenumber(double k0) {
    return from_frequency(k0 * c0 / (2.0 * pi));
  }
};

inline constexpr cplx jj{0.0, 1.0};

}  // namespace csmom
