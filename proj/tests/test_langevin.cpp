#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "optofb/langevin.hpp"
#include "optofb/steady.hpp"

using namespace optofb;

namespace {

SystemParams make_sys(double quality, double zeta, double theta, double eta, double gamma_c = 1e4) {
  return SystemParams::from_dimensionless(quality, zeta, BathParams::make(theta, 100.0, eta), gamma_c);
}

EnsembleOptions quick(const LinearSDE& sde, int n_traj = 40, double relax_times = 20.0) {
  EnsembleOptions o;
  o.dt = 0.05 / sde.fastest_rate;
  o.n_steps = static_cast<long>(relax_times / (sde.damping * o.dt));
  o.n_traj = n_traj;
  o.seed = 99;
  o.threads = 2;
  return o;
}

}  // namespace

TEST_CASE("uncontrolled oscillator") {
  const auto sys = make_sys(1e4, 0.0, 1e5, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::cold_damping(0.0), SdeForm::adiabatic);
  CHECK(sde.dim == 2);
  CHECK(sde.drift(0, 0) == 0.0);
  CHECK(sde.drift(0, 1) == 1.0);
  CHECK(sde.drift(1, 0) == -1.0);
  CHECK(sde.drift(1, 1) == doctest::Approx(-1e-4));
  const Matrix s = stationary_covariance_lyapunov(sde);
  // Ornstein-Uhlenbeck: A S + S A^T + B B^T = 0 with B B^T = diag(0, gamma theta)
  CHECK(s(0, 0) == doctest::Approx(5e4).epsilon(1e-12));
  CHECK(s(1, 1) == doctest::Approx(5e4).epsilon(1e-12));
  CHECK(std::abs(s(0, 1)) < 1e-9 * 5e4);
}

TEST_CASE("drift trace and damping") {
  for (double g : {0.5, 10.0, 1e3}) {
    const auto sys = make_sys(1e3, 2.0, 10.0, 0.8);
    const auto m = build_sde(sys, FeedbackScheme::momentum(g), SdeForm::adiabatic);
    CHECK(m.drift.trace() == doctest::Approx(-(1 + g) * 1e-3).epsilon(1e-14));
    const auto c = build_sde(sys, FeedbackScheme::cold_damping(g), SdeForm::adiabatic);
    CHECK(c.drift(1, 1) == doctest::Approx(-(1 + g) * 1e-3).epsilon(1e-14));
    CHECK(c.drift(0, 0) == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.noise * m.noise.transpose());
    CHECK(es.eigenvalues().minCoeff() > -1e-15);
  }
}

TEST_CASE("Lyapunov covariance equals the closed forms") {
  for (double Q : {1e3, 1e5})
    for (double g : {0.0, 1.0, 100.0, 1e5})
      for (double z : {0.1, 10.0, 1e4}) {
        const auto sys = make_sys(Q, z, 30.0, 0.7);
        const auto c = cold_damping_state(sys, g);
        const Matrix sc = stationary_covariance_lyapunov(build_sde(sys, FeedbackScheme::cold_damping(g), SdeForm::adiabatic));
        CHECK(sc(0, 0) == doctest::Approx(c.q2).epsilon(1e-6));
        CHECK(sc(1, 1) == doctest::Approx(c.p2).epsilon(1e-6));
        const auto m = momentum_feedback_state(sys, g);
        const Matrix sm = stationary_covariance_lyapunov(build_sde(sys, FeedbackScheme::momentum(g), SdeForm::adiabatic));
        CHECK(sm(0, 0) == doctest::Approx(m.q2).epsilon(1e-6));
        CHECK(sm(1, 1) == doctest::Approx(m.p2).epsilon(1e-6));
        CHECK(sm(0, 1) == doctest::Approx(m.qp_sym).epsilon(1e-6).scale(std::abs(m.qp_sym) + 1e-12 * m.q2));
      }
}

TEST_CASE("time step precondition") {
  const auto sys = make_sys(100.0, 0.0, 10.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::cold_damping(0.0), SdeForm::adiabatic);
  EnsembleOptions o;
  o.dt = 0.06;
  o.n_steps = 10;
  o.n_traj = 2;
  CHECK_THROWS_AS(simulate_ensemble(sde, o), DomainError);
  o.dt = 0.05;
  o.n_traj = 1;
  CHECK_THROWS_AS(simulate_ensemble(sde, o), DomainError);
  const auto full = build_sde(sys, FeedbackScheme::momentum(0.0), SdeForm::full);
  o.n_traj = 2;
  CHECK_THROWS_AS(simulate_ensemble(full, o), DomainError);  // gamma_c = 1e4 needs dt <= 5e-6
}

TEST_CASE("ensemble reproduces the stationary covariance") {
  const auto sys = make_sys(100.0, 10.0, 10.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::momentum(10.0), SdeForm::adiabatic);
  const Matrix s = stationary_covariance_lyapunov(sde);
  const auto st = simulate_ensemble(sde, quick(sde, 60, 40.0));
  CHECK(st.burn_in_steps >= static_cast<long>(5.0 / (sde.damping * 0.05 / sde.fastest_rate)));
  CHECK(std::abs(st.q2.mean - s(0, 0)) < 3 * st.q2.stderr_);
  CHECK(std::abs(st.p2.mean - s(1, 1)) < 3 * st.p2.stderr_);
  CHECK(std::abs(st.qp.mean - s(0, 1)) < 3 * st.qp.stderr_);
}

TEST_CASE("same seed gives identical statistics regardless of thread count") {
  const auto sys = make_sys(100.0, 5.0, 10.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::cold_damping(3.0), SdeForm::adiabatic);
  auto o = quick(sde, 8, 10.0);
  o.threads = 1;
  const auto a = simulate_ensemble(sde, o);
  o.threads = 3;
  const auto b = simulate_ensemble(sde, o);
  CHECK(a.q2.mean == b.q2.mean);
  CHECK(a.p2.stderr_ == b.p2.stderr_);
  CHECK(a.qp.mean == b.qp.mean);
  CHECK(a.decay_rate == b.decay_rate);
  o.seed += 1;
  CHECK(simulate_ensemble(sde, o).q2.mean != a.q2.mean);
}

TEST_CASE("halving the time step on the same noise path") {
  const auto sys = make_sys(100.0, 10.0, 10.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::momentum(5.0), SdeForm::adiabatic);
  auto o = quick(sde, 30, 30.0);
  o.noise_substeps = 2;
  const auto a = simulate_ensemble(sde, o);
  o.substeps = 2;
  const auto b = simulate_ensemble(sde, o);
  CHECK(std::abs(a.q2.mean - b.q2.mean) < a.q2.stderr_);
  CHECK(std::abs(a.p2.mean - b.p2.mean) < a.p2.stderr_);
  CHECK(std::abs(a.qp.mean - b.qp.mean) < a.qp.stderr_);
}

TEST_CASE("Euler-Maruyama cross-check") {
  const auto sys = make_sys(100.0, 10.0, 10.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::cold_damping(2.0), SdeForm::adiabatic);
  const Matrix s = stationary_covariance_lyapunov(sde);
  auto o = quick(sde, 40, 30.0);
  o.dt = 0.005;
  o.n_steps *= 10;
  o.integrator = Integrator::euler_maruyama;
  const auto st = simulate_ensemble(sde, o);
  // first-order bias of O(dt) on top of sampling noise
  CHECK(std::abs(st.q2.mean - s(0, 0)) < 4 * st.q2.stderr_ + 0.01 * s(0, 0));
}

TEST_CASE("damping enhancement seen in the decay of correlations") {
  for (double g : {0.0, 4.0, 10.0}) {
    const auto sys = make_sys(1e3, g > 0 ? 5.0 : 0.0, 10.0, 0.8);
    const auto sde = build_sde(sys, FeedbackScheme::cold_damping(g), SdeForm::adiabatic);
    const auto st = simulate_ensemble(sde, quick(sde, 100, 30.0));
    CHECK(st.decay_rate == doctest::Approx((1 + g) * 1e-3).epsilon(0.1));
    CHECK(st.autocorrelation_time == doctest::Approx(1.0 / st.decay_rate));
  }
}

TEST_CASE("trajectory dump") {
  const auto dir = std::filesystem::temp_directory_path() / "optofb_dump_test";
  std::filesystem::remove_all(dir);
  const auto sys = make_sys(100.0, 1.0, 1.0, 0.8);
  const auto sde = build_sde(sys, FeedbackScheme::cold_damping(0.0), SdeForm::adiabatic);
  auto o = quick(sde, 3, 2.0);
  o.dump_count = 2;
  o.dump_stride = 10;
  o.dump_dir = dir.string();
  simulate_ensemble(sde, o);
  CHECK(std::filesystem::exists(dir / "traj_0.csv"));
  CHECK(std::filesystem::exists(dir / "traj_1.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "traj_2.csv"));
  std::ifstream in(dir / "traj_0.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,Q,P");
  std::filesystem::remove_all(dir);
}

TEST_CASE("full forms") {
  const auto sys = make_sys(1e3, 10.0, 10.0, 0.8, 1e4);
  const auto m = build_sde(sys, FeedbackScheme::momentum(10.0), SdeForm::full);
  CHECK(m.dim == 4);
  CHECK(m.labels == std::vector<std::string>{"Q", "P", "Y", "X"});
  const auto c = build_sde(sys, FeedbackScheme::cold_damping(10.0), SdeForm::full);
  CHECK(c.dim == 5);
  CHECK(spectral_abscissa(c.drift) < 0.0);
  const auto low = build_sde(make_sys(1e3, 10.0, 10.0, 0.8, 3.0), FeedbackScheme::momentum(1.0), SdeForm::full);
  CHECK_FALSE(low.warnings.empty());
  CHECK_THROWS_AS(build_sde(make_sys(1e3, 0.0, 1.0, 0.8), FeedbackScheme::momentum(1.0), SdeForm::adiabatic),
                  DomainError);
}

TEST_CASE("adiabatic elimination validity") {
  const std::vector<double> ladder{10.0, 1e2, 1e3, 1e4, 1e5};
  for (auto scheme : {FeedbackScheme::momentum(10.0), FeedbackScheme::cold_damping(10.0)}) {
    const auto dev = adiabatic_validity_check(make_sys(1e3, 10.0, 10.0, 0.8), scheme, ladder);
    REQUIRE(dev.size() == ladder.size());
    CHECK_FALSE(dev.front().inside_regime);
    CHECK(dev[3].inside_regime);
    CHECK(dev[3].q2 < 0.01);
    for (std::size_t i = 1; i < dev.size(); ++i) CHECK(dev[i].q2 < dev[i - 1].q2);
  }
  // decoupled cavity: identical mechanical blocks
  const auto off = adiabatic_validity_check(make_sys(1e3, 0.0, 10.0, 0.8), FeedbackScheme::momentum(0.0), {10.0, 1e3});
  for (const auto& d : off) {
    CHECK(d.q2 < 1e-12);
    CHECK(d.p2 < 1e-12);
    CHECK(d.qp < 1e-12);
  }
  CHECK_THROWS_AS(adiabatic_validity_check(make_sys(1e3, 1.0, 1.0, 0.8), FeedbackScheme::momentum(1.0), {10.0, 100.0 - 1}),
                  DomainError);
}
