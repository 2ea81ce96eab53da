#include "csmom/mie.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace csmom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Tilted wave frame so every check exercises the rotation, not just k^ = z^.
PlaneWave tilted_wave(double e0 = 1.0) {
  const Eigen::Vector3d k = Eigen::Vector3d(1.0, 2.0, 2.0).normalized();
  const Eigen::Vector3d p = k.cross(Eigen::Vector3d::UnitZ()).normalized();
  return {k, p, e0};
}

double backscatter_sigma(double k0) {
  const PlaneWave pw({0, 0, 1}, {1, 0, 0});
  const auto ctx = PhysicalContext::from_wavenumber(k0);
  const FarFieldSet ff = mie_far_field(1.0, ctx, pw, {{pi, 0.0}});
  return 4.0 * pi * (std::norm(ff.e_theta(0)) + std::norm(ff.e_phi(0)));
}

}  // namespace

TEST_CASE("series extinction equals series scattering for a conductor",
          "[mie]") {
  for (double k0 : {1.4, 4.0, 9.0}) {
    const double cs = mie_scattering_cross_section(1.0, k0);
    const double ce = mie_extinction_cross_section(1.0, k0);
    REQUIRE_THAT(cs, WithinRel(ce, 1e-12));
  }
}

TEST_CASE("forward amplitude satisfies the optical theorem", "[mie]") {
  // ka = 2 with d = 1 m; forward extinction goes through the full far-field
  // path, so this pins the amplitude prefactor and the frame rotation.
  const double k0 = 4.0;
  const double series = mie_extinction_cross_section(1.0, k0);
  const double forward = mie_forward_extinction(1.0, k0, tilted_wave());
  REQUIRE_THAT(forward, WithinRel(series, 1e-10));

  // Amplitude normalization cancels.
  const double forward5 = mie_forward_extinction(1.0, k0, tilted_wave(5.0));
  REQUIRE_THAT(forward5, WithinRel(series, 1e-10));
}

TEST_CASE("small-sphere backscatter follows the Rayleigh quartic", "[mie]") {
  const double x1 = 0.1, x2 = 0.2;  // ka across one octave, d = 1 m
  const double s1 = backscatter_sigma(2.0 * x1) / std::pow(x1, 4);
  const double s2 = backscatter_sigma(2.0 * x2) / std::pow(x2, 4);
  REQUIRE_THAT(s2 / s1, WithinAbs(1.0, 0.02));
}

TEST_CASE("far field is covariant under azimuth rotation of the wave",
          "[mie]") {
  const double k0 = 4.0, dphi = 0.7, tilt = 0.3;
  const auto ctx = PhysicalContext::from_wavenumber(k0);
  const PlaneWave pw1({std::sin(tilt), 0, std::cos(tilt)},
                      {std::cos(tilt), 0, -std::sin(tilt)});
  const Eigen::AngleAxisd rot(dphi, Eigen::Vector3d::UnitZ());
  const PlaneWave pw2(rot * pw1.k_hat, rot * pw1.e_pol);

  std::vector<Direction> dirs1, dirs2;
  for (double th : {0.4, 1.1, 1.9, 2.8}) {
    for (double ph : {0.0, 0.9, 2.3, 4.4}) {
      dirs1.push_back({th, ph});
      dirs2.push_back({th, ph + dphi});
    }
  }
  const FarFieldSet f1 = mie_far_field(1.0, ctx, pw1, dirs1);
  const FarFieldSet f2 = mie_far_field(1.0, ctx, pw2, dirs2);
  // theta^/phi^ rotate with the grid, so the components must match entrywise.
  REQUIRE((f1.e_theta - f2.e_theta).lpNorm<Eigen::Infinity>() < 1e-12);
  REQUIRE((f1.e_phi - f2.e_phi).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("default truncation order is converged", "[mie]") {
  const double k0 = 3.2;  // ka = 1.6
  const auto ctx = PhysicalContext::from_wavenumber(k0);
  const PlaneWave pw = tilted_wave();
  const auto dirs = direction_grid(30.0);
  const FarFieldSet f0 = mie_far_field(1.0, ctx, pw, dirs);
  const FarFieldSet f5 = mie_far_field(1.0, ctx, pw, dirs, 5);
  const double base =
      std::sqrt(f0.e_theta.squaredNorm() + f0.e_phi.squaredNorm());
  const double diff = std::sqrt((f5.e_theta - f0.e_theta).squaredNorm() +
                                (f5.e_phi - f0.e_phi).squaredNorm());
  REQUIRE(diff < 1e-10 * base);
  REQUIRE_THAT(mie_scattering_cross_section(1.0, k0, 5),
               WithinRel(mie_scattering_cross_section(1.0, k0), 1e-12));
}

TEST_CASE("cavity modes reproduce the known first roots", "[mie]") {
  const auto modes = cavity_resonances(1.0, 12);
  REQUIRE(modes.size() == 12);

  // First interior resonance: the n=1 mode with a radial E field (root of
  // d/dx[x j_1(x)]), well below the first j_1 zero.
  REQUIRE(modes[0].tm);
  REQUIRE(modes[0].n == 1);
  REQUIRE_THAT(modes[0].x, WithinAbs(2.7437, 1e-4));
  REQUIRE_THAT(modes[0].frequency_hz, WithinRel(modes[0].x * c0 / pi, 1e-15));

  const auto te1 = std::find_if(modes.begin(), modes.end(), [](const CavityMode& m) {
    return !m.tm && m.n == 1;
  });
  REQUIRE(te1 != modes.end());
  REQUIRE_THAT(te1->x, WithinAbs(4.493409457909064, 1e-9));

  for (size_t i = 1; i < modes.size(); ++i)
    REQUIRE(modes[i].x > modes[i - 1].x);
  // Within each order the radial-derivative root precedes the j_n root.
  for (const auto& m : modes) {
    if (!m.tm) {
      const auto tm_same_n =
          std::find_if(modes.begin(), modes.end(), [&](const CavityMode& u) {
            return u.tm && u.n == m.n;
          });
      REQUIRE(tm_same_n != modes.end());
      REQUIRE(tm_same_n->x < m.x);
    }
  }
}

TEST_CASE("resonance search extends its bracket as needed", "[mie]") {
  const auto modes = cavity_resonances(0.37, 40);
  REQUIRE(modes.size() == 40);
  for (size_t i = 1; i < modes.size(); ++i)
    REQUIRE(modes[i].frequency_hz > modes[i - 1].frequency_hz);
}

TEST_CASE("oracle inputs are validated", "[mie]") {
  const PlaneWave pw({0, 0, 1}, {1, 0, 0});
  const auto ctx = PhysicalContext::from_wavenumber(2.0);
  REQUIRE_THROWS_AS(mie_far_field(0.0, ctx, pw, {{0.5, 0.5}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(mie_far_field(1.0, ctx, pw, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(mie_scattering_cross_section(1.0, -2.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(cavity_resonances(1.0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(mie_forward_extinction(1.0, 2.0, {{0, 0, 1}, {1, 0, 0}, 0.0}),
                    std::invalid_argument);
}
