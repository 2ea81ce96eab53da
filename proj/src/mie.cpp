#include "csmom/mie.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csmom {

namespace {

int truncation_order(double x) {
  return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
}

// Scattering coefficients of the conducting sphere at size parameter x:
// a_n = psi_n'(x)/zeta_n'(x), b_n = psi_n(x)/zeta_n(x), where psi_n = x j_n
// and zeta_n = x h_n^(2) is the outgoing Riccati-Hankel function for the
// e^{+j w t} convention. Index 0 is unused.
void sphere_coefficients(double x, int nmax, std::vector<cplx>& a,
                         std::vector<cplx>& b) {
  a.assign(nmax + 1, 0.0);
  b.assign(nmax + 1, 0.0);
  for (int n = 1; n <= nmax; ++n) {
    const double jn = std::sph_bessel(n, x);
    const double jm = std::sph_bessel(n - 1, x);
    const double yn = std::sph_neumann(n, x);
    const double ym = std::sph_neumann(n - 1, x);
    const double psi = x * jn;
    const double psi_d = x * jm - n * jn;  // d/dx [x j_n]
    const double eta = x * yn;
    const double eta_d = x * ym - n * yn;
    const cplx zeta = psi - jj * eta;
    const cplx zeta_d = psi_d - jj * eta_d;
    a[n] = psi_d / zeta_d;
    b[n] = psi / zeta;
  }
}

// Amplitude functions S1, S2 at cos(theta) = mu via the pi/tau recurrences.
void amplitude_functions(const std::vector<cplx>& a, const std::vector<cplx>& b,
                         double mu, cplx& s1, cplx& s2) {
  s1 = 0.0;
  s2 = 0.0;
  double pi_prev = 0.0;  // pi_0
  double pi_n = 1.0;     // pi_1
  const int nmax = static_cast<int>(a.size()) - 1;
  for (int n = 1; n <= nmax; ++n) {
    const double tau_n = n * mu * pi_n - (n + 1) * pi_prev;
    const double fac = (2.0 * n + 1.0) / (n * (n + 1.0));
    s1 += fac * (a[n] * pi_n + b[n] * tau_n);
    s2 += fac * (a[n] * tau_n + b[n] * pi_n);
    const double pi_next = ((2.0 * n + 1.0) * mu * pi_n - (n + 1) * pi_prev) / n;
    pi_prev = pi_n;
    pi_n = pi_next;
  }
}

cplx dot3(const Eigen::Vector3d& u, const Eigen::Vector3cd& f) {
  return u.x() * f.x() + u.y() * f.y() + u.z() * f.z();
}

void check_sphere_args(double diameter, double k0) {
  if (diameter <= 0.0) throw std::invalid_argument("diameter must be positive");
  if (k0 <= 0.0) throw std::invalid_argument("k0 must be positive");
}

}  // namespace

FarFieldSet mie_far_field(double diameter, const PhysicalContext& ctx,
                          const PlaneWave& pw,
                          const std::vector<Direction>& directions,
                          int extra_terms) {
  check_sphere_args(diameter, ctx.k0);
  if (directions.empty()) throw std::invalid_argument("no directions");

  const double k0 = ctx.k0;
  const double x = k0 * 0.5 * diameter;
  const int nmax = std::max(1, truncation_order(x) + extra_terms);
  std::vector<cplx> a, b;
  sphere_coefficients(x, nmax, a, b);

  // Wave frame: zp along propagation, xp along polarization.
  const Eigen::Vector3d xp = pw.e_pol;
  const Eigen::Vector3d zp = pw.k_hat;
  const Eigen::Vector3d yp = zp.cross(xp);

  const int nd = static_cast<int>(directions.size());
  FarFieldSet ff;
  ff.directions = directions;
  ff.e_theta.resize(nd);
  ff.e_phi.resize(nd);
  ff.label = "mie";
  ff.frequency_hz = ctx.frequency_hz;
  ff.mesh_id = "analytic-sphere";
  ff.unknowns = 0;

  const cplx pref = pw.amplitude / k0;
  for (int d = 0; d < nd; ++d) {
    const double st = std::sin(directions[d].theta);
    const double ct = std::cos(directions[d].theta);
    const double sp = std::sin(directions[d].phi);
    const double cp = std::cos(directions[d].phi);
    const Eigen::Vector3d rhat(st * cp, st * sp, ct);

    const double mu = std::clamp(rhat.dot(zp), -1.0, 1.0);
    const double phip = std::atan2(rhat.dot(yp), rhat.dot(xp));
    cplx s1, s2;
    amplitude_functions(a, b, mu, s1, s2);

    // Field in the wave frame's spherical basis; the apparent phi' dependence
    // cancels at the poles, so any atan2 value there is consistent.
    const cplx f_thp = -jj * pref * std::cos(phip) * s2;
    const cplx f_php = jj * pref * std::sin(phip) * s1;
    const double stp = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    const Eigen::Vector3d th_p =
        mu * std::cos(phip) * xp + mu * std::sin(phip) * yp - stp * zp;
    const Eigen::Vector3d ph_p = -std::sin(phip) * xp + std::cos(phip) * yp;
    const Eigen::Vector3cd f = f_thp * th_p.cast<cplx>() + f_php * ph_p.cast<cplx>();

    const Eigen::Vector3d th(ct * cp, ct * sp, -st);
    const Eigen::Vector3d ph(-sp, cp, 0.0);
    ff.e_theta(d) = dot3(th, f);
    ff.e_phi(d) = dot3(ph, f);
  }
  return ff;
}

double mie_scattering_cross_section(double diameter, double k0,
                                    int extra_terms) {
  check_sphere_args(diameter, k0);
  const double x = k0 * 0.5 * diameter;
  const int nmax = std::max(1, truncation_order(x) + extra_terms);
  std::vector<cplx> a, b;
  sphere_coefficients(x, nmax, a, b);
  double sum = 0.0;
  for (int n = 1; n <= nmax; ++n)
    sum += (2.0 * n + 1.0) * (std::norm(a[n]) + std::norm(b[n]));
  return 2.0 * pi / (k0 * k0) * sum;
}

double mie_extinction_cross_section(double diameter, double k0,
                                    int extra_terms) {
  check_sphere_args(diameter, k0);
  const double x = k0 * 0.5 * diameter;
  const int nmax = std::max(1, truncation_order(x) + extra_terms);
  std::vector<cplx> a, b;
  sphere_coefficients(x, nmax, a, b);
  double sum = 0.0;
  for (int n = 1; n <= nmax; ++n)
    sum += (2.0 * n + 1.0) * (a[n] + b[n]).real();
  return 2.0 * pi / (k0 * k0) * sum;
}

double mie_forward_extinction(double diameter, double k0, const PlaneWave& pw,
                              int extra_terms) {
  check_sphere_args(diameter, k0);
  if (pw.amplitude == 0.0) throw std::invalid_argument("zero amplitude");
  const double th = std::acos(std::clamp(pw.k_hat.z(), -1.0, 1.0));
  const double ph = std::atan2(pw.k_hat.y(), pw.k_hat.x());
  const auto ctx = PhysicalContext::from_wavenumber(k0);
  const FarFieldSet ff =
      mie_far_field(diameter, ctx, pw, {{th, ph}}, extra_terms);

  const double st = std::sin(th), ct = std::cos(th);
  const double sp = std::sin(ph), cp = std::cos(ph);
  const Eigen::Vector3d that(ct * cp, ct * sp, -st);
  const Eigen::Vector3d phat(-sp, cp, 0.0);
  // Forward amplitude projected on the polarization; optical theorem for the
  // e^{+j w t} convention: C_ext = -(4 pi / k) Im(f.p) / E0.
  const cplx fp =
      ff.e_theta(0) * that.dot(pw.e_pol) + ff.e_phi(0) * phat.dot(pw.e_pol);
  return -4.0 * pi / (k0 * pw.amplitude) * fp.imag();
}

namespace {

double te_characteristic(int n, double x) { return std::sph_bessel(n, x); }

// d/dx [x j_n(x)] = x j_{n-1}(x) - n j_n(x)
double tm_characteristic(int n, double x) {
  return x * std::sph_bessel(n - 1, x) - n * std::sph_bessel(n, x);
}

double bisect(int n, bool tm, double lo, double hi) {
  auto f = [&](double x) {
    return tm ? tm_characteristic(n, x) : te_characteristic(n, x);
  };
  double flo = f(lo);
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<CavityMode> cavity_resonances(double diameter, int count) {
  if (diameter <= 0.0) throw std::invalid_argument("diameter must be positive");
  if (count < 1) throw std::invalid_argument("count must be positive");

  double xmax = 8.0;
  std::vector<CavityMode> modes;
  while (true) {
    modes.clear();
    const int ncap = static_cast<int>(xmax) + 1;  // first roots grow with n
    const double step = 0.02;
    for (int n = 1; n <= ncap; ++n) {
      for (int tm = 0; tm <= 1; ++tm) {
        double prev_x = 0.05;
        double prev_f = tm ? tm_characteristic(n, prev_x)
                           : te_characteristic(n, prev_x);
        for (double xx = prev_x + step; xx <= xmax; xx += step) {
          const double fx =
              tm ? tm_characteristic(n, xx) : te_characteristic(n, xx);
          if ((prev_f < 0.0) != (fx < 0.0)) {
            const double root = bisect(n, tm != 0, prev_x, xx);
            modes.push_back({root, root * c0 / (pi * diameter), n, tm != 0});
          }
          prev_x = xx;
          prev_f = fx;
        }
      }
    }
    std::sort(modes.begin(), modes.end(),
              [](const CavityMode& u, const CavityMode& v) { return u.x < v.x; });
    if (static_cast<int>(modes.size()) >= count) {
      modes.resize(count);
      return modes;
    }
    xmax *= 1.6;
  }
}

}  // namespace csmom
