#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "optofb/model.hpp"

using namespace optofb;

namespace {

CavityParams cavity(double g, double gamma_c) {
  return CavityParams::make(0.0, 0.0, gamma_c, g, DriveAmplitude{1.0});
}

}  // namespace

TEST_CASE("zeta from coupling and amplitude") {
  const auto mech1 = MechanicalParams::make(1.0, 1.0);
  CHECK(derive_zeta(cavity(0.0, 3.0), mech1, 7.0) == 0.0);
  CHECK(derive_zeta(cavity(1.0, 16.0), mech1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const auto mech2 = MechanicalParams::make(1.0, 0.5);
  CHECK(derive_zeta(cavity(2.0, 8.0), mech2, 3.0) == doctest::Approx(144.0).epsilon(1e-15));
}

TEST_CASE("zeta from input power matches zeta from amplitude") {
  // E = sqrt(P gamma_c / omega_0), beta = 2E/gamma_c at zero detuning
  const auto mech = MechanicalParams::make(1.0, 1e-3);
  const double P = 2.5, omega0 = 1e6, gc = 40.0, G = 0.3;
  const auto cav = CavityParams::make(omega0, omega0, gc, G, InputPower{P});
  const double beta = 2.0 * std::sqrt(P * gc / omega0) / gc;
  CHECK(derive_zeta_from_power(cav, mech, P) ==
        doctest::Approx(16.0 * G * G * beta * beta / (1e-3 * gc)).epsilon(1e-13));
  CHECK(cav.drive_amplitude() == doctest::Approx(std::sqrt(P * gc / omega0)).epsilon(1e-15));
}

TEST_CASE("zeta is homogeneous of degree two in G and beta") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    const auto mech = MechanicalParams::make(1.0, u(rng));
    const double g = u(rng), gc = u(rng), beta = u(rng);
    const double z = derive_zeta(cavity(g, gc), mech, beta);
    CHECK(derive_zeta(cavity(2.0 * g, gc), mech, beta) == doctest::Approx(4.0 * z).epsilon(1e-14));
    CHECK(derive_zeta(cavity(g, gc), mech, 2.0 * beta) == doctest::Approx(4.0 * z).epsilon(1e-14));
  }
}

TEST_CASE("parameter domains are enforced") {
  CHECK_THROWS_AS(MechanicalParams::make(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(MechanicalParams::make(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(CavityParams::make(0, 0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(CavityParams::make(0, 0, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(BathParams::make(-1.0, 100, 0.8), DomainError);
  CHECK_THROWS_AS(BathParams::make(1.0, 100, 0.0), DomainError);
  CHECK_THROWS_AS(BathParams::make(1.0, 100, 1.1), DomainError);
  try {
    BathParams::make(1.0, 100, 0.0);
  } catch (const DomainError& e) {
    CHECK(e.key() == "eta");
  }
  const auto m = MechanicalParams::from_quality(1e4);
  CHECK(m.quality() == 1e4);
  CHECK(m.gamma_ratio() == 1e-4);
}

TEST_CASE("dimensionless construction reproduces zeta") {
  const auto sys = SystemParams::from_dimensionless(1e4, 37.0, BathParams{}, 1e4);
  CHECK(derive_zeta(sys.cav, sys.mech, sys.beta) == doctest::Approx(37.0).epsilon(1e-13));
  CHECK(sys.quality() == doctest::Approx(1e4));
  CHECK(sys.coupling_rate() == doctest::Approx(std::sqrt(37.0 * 1e-4 * 1e4) / 4.0).epsilon(1e-14));
}

TEST_CASE("zero-detuning working point") {
  const auto mech = MechanicalParams::make(1.0, 1e-3);
  auto cav = CavityParams::make(5.0, 0.0, 16.0, 0.2, DriveAmplitude{8.0});
  const auto s = solve_semiclassical(cav, mech, true);
  CHECK(s.beta.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.beta.imag() == 0.0);
  CHECK(std::abs(s.detuning) < 1e-14);
  // the tuned drive frequency cancels the radiation-pressure shift
  const double delta = cav.omega_c - s.omega_0 + 2.0 * 0.2 * 0.2 * 1.0;
  CHECK(std::abs(delta) < 1e-12);
  CHECK(s.residual < 1e-12);
}

TEST_CASE("linear cavity without coupling") {
  const auto mech = MechanicalParams::make(1.0, 1e-3);
  const double E = 1.3, gc = 2.0, d0 = 0.7;
  auto cav = CavityParams::make(d0, 0.0, gc, 0.0, DriveAmplitude{E});
  const auto s = solve_semiclassical(cav, mech, false);
  const std::complex<double> expected = E / std::complex<double>(gc / 2.0, d0);
  CHECK(std::abs(s.beta - expected) < 1e-14);
  CHECK_FALSE(s.multistable);
}

TEST_CASE("detuned working point satisfies the fixed-point equation") {
  const auto mech = MechanicalParams::make(1.0, 1e-3);
  const double G = 0.1, gc = 1.0, d0 = -0.05, E = 1.0;
  auto cav = CavityParams::make(d0, 0.0, gc, G, DriveAmplitude{E});
  const auto s = solve_semiclassical(cav, mech, false);
  const double n = std::norm(s.beta);
  const std::complex<double> rhs = E / std::complex<double>(gc / 2.0, d0 + 2.0 * G * G * n);
  CHECK(std::abs(s.beta - rhs) < 1e-12);
  CHECK(s.residual < 1e-12);
}

TEST_CASE("bistable working point takes the lowest-intensity branch") {
  const auto mech = MechanicalParams::make(1.0, 1e-3);
  // strongly red-detuned drive with large coupling: three real intensity roots
  const double G = 1.0, gc = 0.2, d0 = -3.0, E = 1.0;
  auto cav = CavityParams::make(d0, 0.0, gc, G, DriveAmplitude{E});
  const auto s = solve_semiclassical(cav, mech, false);
  REQUIRE(s.intensity_roots.size() == 3);
  CHECK(s.multistable);
  CHECK(std::norm(s.beta) == doctest::Approx(s.intensity_roots.front()).epsilon(1e-10));
  for (double n : s.intensity_roots) {
    // each root solves n ((gc/2)^2 + (d0 + 2 G^2 n)^2) = E^2
    const double d = d0 + 2.0 * G * G * n;
    CHECK(n * (gc * gc / 4.0 + d * d) == doctest::Approx(E * E).epsilon(1e-10));
  }
}

TEST_CASE("ring cavity relative frame") {
  const auto mech = MechanicalParams::make(1.0, 1.0);
  SystemParams two{mech, CavityParams::make(0, 0, 32.0, 1.0), BathParams{}, 1.0, 0.0};
  const auto ring = to_relative_frame(two);
  CHECK(ring.relative.zeta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ring.relative.cav.coupling_g == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ring.center_of_mass_thermal_only);
  CHECK(ring.center_of_mass.zeta == 0.0);

  SystemParams off = two;
  off.cav.coupling_g = 0.0;
  const auto r0 = to_relative_frame(off);
  CHECK(r0.relative.zeta == 0.0);
  CHECK(r0.relative.cav.coupling_g == 0.0);

  // single-mirror formula with G = sqrt(2) G~ gives 32 G~^2 beta~^2 / (gamma_m gamma_c)
  SystemParams gen{MechanicalParams::make(1.0, 0.3), CavityParams::make(0, 0, 7.0, 0.4), BathParams{}, 2.5, 0.0};
  CHECK(to_relative_frame(gen).relative.zeta ==
        doctest::Approx(32.0 * 0.16 * 6.25 / (0.3 * 7.0)).epsilon(1e-14));
}

TEST_CASE("gain maps and scheme names") {
  CHECK(momentum_gain_from_loop(-0.5, 2.0, 0.1) == doctest::Approx(40.0));
  CHECK(cold_damping_gain_from_loop(0.5, 2.0, 1.0, 0.1, 10.0) == doctest::Approx(4.0 * 2.0 * 0.5 / (0.1 * 10.0)));
  CHECK(scheme_from_string(to_string(SchemeKind::MomentumFeedback)) == SchemeKind::MomentumFeedback);
  CHECK(scheme_from_string(to_string(SchemeKind::ColdDamping)) == SchemeKind::ColdDamping);
  CHECK(scheme_from_string(to_string(SchemeKind::RingRelative)) == SchemeKind::RingRelative);
  CHECK_THROWS_AS(scheme_from_string("bogus"), DomainError);
}
