#include <doctest.h>

#include <cmath>
#include <random>

#include "optofb/steady.hpp"

using namespace optofb;

namespace {

SystemParams make_sys(double quality, double zeta, double theta, double eta, double cutoff = 100.0) {
  return SystemParams::from_dimensionless(quality, zeta, BathParams::make(theta, cutoff, eta));
}

// Independent transcription of the momentum-feedback moments.
struct Ref {
  double q2, p2, qp;
};
Ref momentum_ref(double g, double zeta, double Q, double eta, double theta) {
  const double D = (1.0 + g) * (Q * Q + g);
  const double q2 = zeta * Q * Q / (8 * D) + g * g * (1 + Q * Q + g) / (8 * eta * zeta * D) + theta * Q * Q / (2 * D);
  const double p2 = zeta * (Q * Q + g * g + g) / (8 * D) + g * g * Q * Q / (8 * eta * zeta * D) +
                    theta * (g * g + Q * Q + g) / (2 * D);
  const double qp = (zeta / 8 + theta / 2) * g * Q / D - g * g * Q / (8 * eta * zeta * D);
  return {q2, p2, qp};
}

}  // namespace

TEST_CASE("cold damping closed form") {
  CHECK(cold_damping_state(make_sys(1e4, 0.0, 1e5, 0.8), 0.0).q2 == 5e4);

  const auto s = cold_damping_state(make_sys(1e4, 100.0, 1e5, 1.0), 100.0);
  CHECK(s.q2 == doctest::Approx((12.5 + 12.5 + 5e4) / 101.0).epsilon(1e-14));
  CHECK(s.q2 == doctest::Approx(495.297).epsilon(1e-6));
  CHECK(s.q2_parts.back_action == doctest::Approx(100.0 / (8 * 101.0)).epsilon(1e-15));
  CHECK(s.q2_parts.feedback_induced == doctest::Approx(1e4 / (8 * 100.0 * 101.0)).epsilon(1e-15));
  CHECK(s.q2_parts.brownian == doctest::Approx(5e4 / 101.0).epsilon(1e-15));
  REQUIRE(s.occupancy);
  CHECK(*s.occupancy == doctest::Approx(2 * s.q2 - 0.5).epsilon(1e-15));

  const double g = 1e7;
  const auto e = cold_damping_state(make_sys(1e4, g / std::sqrt(0.8), 1e5, 0.8), g);
  CHECK(e.energy_units == doctest::Approx(1.1380).epsilon(1e-4));
}

TEST_CASE("zero input power with feedback is rejected") {
  CHECK_THROWS_AS(cold_damping_state(make_sys(1e4, 0.0, 1.0, 0.8), 1.0), DomainError);
  CHECK_THROWS_AS(momentum_feedback_state(make_sys(1e4, 0.0, 1.0, 0.8), 1.0), DomainError);
}

TEST_CASE("breakdown additivity and cold damping symmetry over random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lu(-2.0, 9.0);
  std::uniform_real_distribution<double> ue(0.05, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double g = std::pow(10.0, lu(rng)), z = std::pow(10.0, lu(rng)), th = std::pow(10.0, lu(rng));
    const double Q = std::pow(10.0, 2.0 + std::abs(lu(rng)) / 2), eta = ue(rng);
    const auto sys = make_sys(Q, z, th, eta);
    for (const auto& s : {cold_damping_state(sys, g), momentum_feedback_state(sys, g),
                          momentum_feedback_state(sys, g, true)}) {
      CHECK(std::abs(s.q2_parts.total() - s.q2) <= 1e-14 * s.q2);
      CHECK(std::abs(s.p2_parts.total() - s.p2) <= 1e-14 * s.p2);
      CHECK(s.q2 > 0.0);
      CHECK(s.p2 > 0.0);
      CHECK(s.energy_units == doctest::Approx(2 * (s.q2 + s.p2)).epsilon(1e-15));
    }
    const auto c = cold_damping_state(sys, g);
    CHECK(c.q2 == c.p2);
    CHECK(c.qp_sym == 0.0);

    const auto m = momentum_feedback_state(sys, g);
    const auto r = momentum_ref(g, z, Q, eta, th);
    CHECK(m.q2 == doctest::Approx(r.q2).epsilon(1e-12));
    CHECK(m.p2 == doctest::Approx(r.p2).epsilon(1e-12));
    CHECK(m.qp_sym == doctest::Approx(r.qp).epsilon(1e-11).scale(std::abs(r.qp) + 1e-300));
  }
}

TEST_CASE("logarithmic term enters the momentum variance only") {
  const auto sys = make_sys(1e3, 10.0, 1e5, 0.8, 100.0);
  const auto off = cold_damping_state(sys, 5.0);
  const auto on = cold_damping_state(sys, 5.0, true);
  const double term = 1e-3 / M_PI * std::log(100.0 / (2 * M_PI));
  CHECK(on.log_term == doctest::Approx(term).epsilon(1e-14));
  CHECK(on.p2 - off.p2 == doctest::Approx(term).epsilon(1e-6));
  CHECK(on.q2 == off.q2);

  std::vector<std::string> w;
  CHECK(log_correction_term(1e3, 5.0, &w) == 0.0);
  CHECK(w.size() == 1);
  CHECK(log_correction_term(1e12, 100.0) < 1e-12);
}

TEST_CASE("momentum feedback limits") {
  const auto s = momentum_feedback_state(make_sys(1e4, 3.0, 7.0, 0.8), 0.0);
  CHECK(s.q2 == doctest::Approx(3.0 / 8 + 3.5).epsilon(1e-7));
  CHECK(s.qp_sym == 0.0);

  // large quality factor: cold-damping form with g2 = g1
  for (double g : {1.0, 1e2, 1e4}) {
    const double Q = 1e4 * g;
    const auto sys = make_sys(Q, 3.0 * g, 1e3, 0.8);
    const auto m = momentum_feedback_state(sys, g);
    const auto c = cold_damping_state(sys, g);
    CHECK(m.q2 == doctest::Approx(c.q2).epsilon(1e-3));
    CHECK(m.p2 == doctest::Approx(c.p2).epsilon(1e-3));
  }

  // positive correlation when the gain is below eta zeta (zeta + 4 theta)
  CHECK(momentum_feedback_state(make_sys(1e4, 1e5, 1e5, 0.8), 1e5).qp_sym > 0.0);
}

TEST_CASE("contractive threshold") {
  CHECK(contractive_threshold(make_sys(1e4, 1.0, 0.0, 1.0)) == doctest::Approx(1.0));
  CHECK(contractive_threshold(make_sys(1e4, 1e3, 1e5, 0.8)) == doctest::Approx(3.208e8).epsilon(1e-14));
  for (double z : {1e-2, 1.0, 1e3}) {
    const auto sys = make_sys(1e4, z, 1e5, 0.8);
    const double gt = contractive_threshold(sys);
    const auto at = momentum_feedback_state(sys, gt);
    // scale of the two cancelling terms
    const double D = (1 + gt) * (1e8 + gt);
    const double scale = (z / 8 + 5e4) * gt * 1e4 / D;
    CHECK(std::abs(at.qp_sym) <= 1e-12 * std::max(1.0, scale));
    CHECK(momentum_feedback_state(sys, gt * (1 - 1e-6)).qp_sym > 0.0);
    CHECK(momentum_feedback_state(sys, gt * (1 + 1e-6)).qp_sym < 0.0);
  }
}

TEST_CASE("cold damping optimum") {
  for (double g : {1.0, 1e2, 1e4, 1e7})
    for (double eta : {0.5, 0.8, 1.0}) {
      const auto o = cold_damping_optimum(g, eta, 1e5);
      CHECK(o.interior);
      CHECK(o.zeta_opt == doctest::Approx(g / std::sqrt(eta)).epsilon(1e-6));
    }
  const auto o = cold_damping_optimum(100.0, 1.0, 1e5);
  CHECK(o.energy_analytic == doctest::Approx(100.0 / 101.0 * (1.0 + 2000.0)).epsilon(1e-14));
  CHECK(cold_damping_optimum(10.0, 0.25, 1e5).zeta_analytic == doctest::Approx(20.0));
  const auto z = cold_damping_optimum(0.0, 0.8, 1e5);
  CHECK_FALSE(z.interior);
  CHECK(z.zeta_opt == 0.0);
}

TEST_CASE("momentum feedback optimum") {
  const auto o = momentum_feedback_optimum(1e3, 0.8, 1e5, 1e7);
  CHECK(o.zeta_opt == doctest::Approx(1e3 / std::sqrt(0.8)).epsilon(1e-2));
  // the exact minimizer of a/zeta + b zeta is sqrt(a/b)
  for (double g : {10.0, 1e3, 1e7})
    for (double Q : {1e3, 1e7}) {
      const double a = g * g * (1 + 2 * Q * Q + g) / 0.8, b = g * g + 2 * Q * Q + g;
      const auto m = momentum_feedback_optimum(g, 0.8, 1e5, Q);
      CHECK(m.zeta_opt == doctest::Approx(std::sqrt(a / b)).epsilon(1e-6));
      CHECK(momentum_feedback_exact_zeta_opt(g, 0.8, Q) == doctest::Approx(std::sqrt(a / b)).epsilon(1e-14));
    }
  // equal gain and quality factor: the optimum sits at sqrt(2/3) g / sqrt(eta)
  const auto eq = momentum_feedback_optimum(1e7, 0.8, 1e5, 1e7);
  CHECK(eq.zeta_opt / (1e7 / std::sqrt(0.8)) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-6));
  CHECK(momentum_feedback_optimum(1e7, 0.8, 1e5, 1e3).energy_units > 1e3);
  CHECK_FALSE(momentum_feedback_optimum(0.0, 0.8, 1e5, 1e4).interior);
}

TEST_CASE("ground-state limit") {
  const double theta = 1e5;
  for (double g : {1e3, 1e6, 1e9}) {
    const auto c = cold_damping_state(make_sys(1e4, g, theta, 1.0), g);
    CHECK(c.energy_units - 1.0 <= 3.0 * theta / g);
    const double Q = 1e3 * g;
    const auto m = momentum_feedback_state(make_sys(Q, momentum_feedback_exact_zeta_opt(g, 1.0, Q), theta, 1.0), g);
    CHECK(m.energy_units - 1.0 <= 3.0 * theta / g);
  }
  const auto c = cold_damping_state(make_sys(1e4, 1e9, theta, 1.0), 1e9);
  CHECK(c.energy_units == doctest::Approx((1e9 / (1 + 1e9)) * (1 + 2e5 / 1e9)).epsilon(1e-12));
}

TEST_CASE("position squeezing") {
  for (double g : {1e7, 1e9}) {
    const auto m = squeezing_minimum(g, 1e4, 0.8, 1e5);
    const double Q = 1e4, D = (1 + g) * (Q * Q + g);
    const double ref = g * Q * std::sqrt(1 + Q * Q + g) / (4 * std::sqrt(0.8) * D) + 1e5 * Q * Q / (2 * D);
    CHECK(m.q2_min == doctest::Approx(ref).epsilon(1e-13));
    CHECK(m.q2_min_numeric == doctest::Approx(ref).epsilon(1e-8));
    CHECK(m.zeta_numeric == doctest::Approx(m.zeta_at_min).epsilon(1e-4));
    CHECK(m.zeta_at_min == doctest::Approx(g / Q * std::sqrt((1 + Q * Q + g) / 0.8)).epsilon(1e-14));
  }
  CHECK(squeezing_minimum(1e9, 1e4, 0.8, 1e5).q2_min < 0.25);
  CHECK(squeezing_minimum(1e7, 1e4, 0.8, 1e5).q2_min > 0.25);
  // g^{-1/2} law
  double prev = squeezing_minimum(1e12, 1e3, 0.8, 1e5).q2_min;
  double ratio = 0.0;
  for (double g = 4e12; g <= 1e20; g *= 4) {
    const double cur = squeezing_minimum(g, 1e3, 0.8, 1e5).q2_min;
    ratio = cur / prev;
    prev = cur;
  }
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("nonclassicality report") {
  const auto sys = make_sys(1e4, 1.0, 1e5, 0.8);
  const auto r = nonclassicality(sys, 1e6);
  CHECK(r.contractive_gain_threshold == doctest::Approx(0.8 * (1 + 4e5)));
  CHECK(r.contractive == (momentum_feedback_state(sys, 1e6).qp_sym < 0.0));
  CHECK(r.contractive);
  CHECK(r.squeezed == (momentum_feedback_state(sys, 1e6).q2 < 0.25));
}

TEST_CASE("entanglement marker of the ring cavity") {
  const double Q = 1e3, eta = 0.8, theta = 1e5, g = 1e18;
  RingSystem ring;
  ring.relative = make_sys(Q, 0.0, theta, eta, 100.0);
  const auto r = entanglement_marker(ring, g, 100.0);
  const double zt = g / Q * std::sqrt((1 + Q * Q + g) / eta);
  CHECK(r.ring_zeta == doctest::Approx(zt).epsilon(1e-14));
  const double D = (1 + g) * (Q * Q + g);
  const double qm = zt * Q * Q / (8 * D) + g * g * (1 + Q * Q + g) / (8 * eta * zt * D) + theta * Q * Q / (2 * D);
  const double pp = theta / 2 + 1e-3 / M_PI * std::log(100.0 / (2 * M_PI));
  CHECK(r.q_minus2 == doctest::Approx(qm).epsilon(1e-12));
  CHECK(r.q_minus2 == doctest::Approx(Q / (4 * std::sqrt(eta) * std::sqrt(g))).epsilon(1e-3));
  CHECK(r.p_plus2 == doctest::Approx(pp).epsilon(1e-15));
  REQUIRE(r.entanglement_marker);
  CHECK(*r.entanglement_marker == doctest::Approx(16 * qm * pp).epsilon(1e-12));
  CHECK(std::abs(*r.entanglement_marker - 0.224) < 1e-3);
  CHECK(r.entangled);

  ring.relative.zeta = 4.0;
  const auto z = entanglement_marker(ring, 0.0, 100.0);
  CHECK(z.q_minus2 == doctest::Approx(0.5 + theta / 2).epsilon(1e-9));
  CHECK(*z.entanglement_marker > 1e5);

  double prev = 1e300;
  for (double gg = 1e12; gg <= 1e22; gg *= 10) {
    const double e = *entanglement_marker(ring, gg, 100.0).entanglement_marker;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("states below the uncertainty bound are flagged") {
  const auto s = cold_damping_state(make_sys(1e4, 0.0, 0.1, 0.8), 0.0);
  CHECK(s.q2 == doctest::Approx(0.05));
  CHECK(s.below_uncertainty_bound);
  CHECK_FALSE(cold_damping_state(make_sys(1e4, 0.0, 10.0, 0.8), 0.0).below_uncertainty_bound);
}

TEST_CASE("ellipse angle") {
  const auto s = momentum_feedback_state(make_sys(1e4, 1.0, 1e5, 0.8), 1e6);
  CHECK(s.ellipse_angle == doctest::Approx(0.5 * std::atan2(2 * s.qp_sym, s.q2 - s.p2)).epsilon(1e-14));
  CHECK_FALSE(s.occupancy);
}
