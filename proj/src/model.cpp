#include "optofb/model.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

namespace optofb {

namespace {

void require_positive(const char* key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(key, "must be positive and finite");
}

void require_nonnegative(const char* key, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(key, "must be non-negative and finite");
}

}  // namespace

MechanicalParams MechanicalParams::make(double omega_m, double gamma_m) {
  require_positive("omega_m", omega_m);
  require_positive("gamma_m", gamma_m);
  return {omega_m, gamma_m};
}

MechanicalParams MechanicalParams::from_quality(double quality) {
  require_positive("quality", quality);
  return {1.0, 1.0 / quality};
}

CavityParams CavityParams::make(double omega_c, double omega_0, double gamma_c, double coupling_g,
                                std::variant<DriveAmplitude, InputPower> drive) {
  require_positive("gamma_c", gamma_c);
  require_nonnegative("coupling_g", coupling_g);
  if (auto* p = std::get_if<InputPower>(&drive)) {
    require_nonnegative("power", p->power);
    require_positive("omega_0", omega_0);
  } else {
    const double e = std::get<DriveAmplitude>(drive).E;
    if (!std::isfinite(e)) throw DomainError("drive_E", "must be finite");
  }
  return {omega_c, omega_0, gamma_c, coupling_g, drive};
}

double CavityParams::drive_amplitude() const {
  if (auto* p = std::get_if<InputPower>(&drive)) return std::sqrt(p->power * gamma_c / omega_0);
  return std::get<DriveAmplitude>(drive).E;
}

double CavityParams::input_power() const {
  if (auto* p = std::get_if<InputPower>(&drive)) return p->power;
  const double e = std::get<DriveAmplitude>(drive).E;
  return e * e * omega_0 / gamma_c;
}

BathParams BathParams::make(double theta, double cutoff_ratio, double eta) {
  require_nonnegative("theta", theta);
  require_positive("cutoff_ratio", cutoff_ratio);
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta", "must lie in (0, 1]");
  return {theta, cutoff_ratio, eta};
}

SystemParams SystemParams::from_coupling(MechanicalParams mech, CavityParams cav, BathParams bath,
                                         double beta) {
  SystemParams s{mech, cav, bath, beta, 0.0};
  s.zeta = derive_zeta(cav, mech, beta);
  return s;
}

SystemParams SystemParams::from_dimensionless(double quality, double zeta, BathParams bath,
                                              double gamma_c_over_omega_m) {
  require_nonnegative("zeta", zeta);
  require_positive("gamma_c", gamma_c_over_omega_m);
  auto mech = MechanicalParams::from_quality(quality);
  const double g = std::sqrt(zeta * mech.gamma_m * gamma_c_over_omega_m) / 4.0;
  auto cav = CavityParams::make(0.0, 0.0, gamma_c_over_omega_m, g);
  cav.drive = DriveAmplitude{gamma_c_over_omega_m / 2.0};  // beta = 2E/gamma_c = 1
  SystemParams s{mech, cav, bath, 1.0, zeta};
  return s;
}

FeedbackScheme FeedbackScheme::momentum(double g1) {
  require_nonnegative("gain", g1);
  return {SchemeKind::MomentumFeedback, g1, std::nullopt};
}

FeedbackScheme FeedbackScheme::cold_damping(double g2) {
  require_nonnegative("gain", g2);
  return {SchemeKind::ColdDamping, g2, std::nullopt};
}

FeedbackScheme FeedbackScheme::ring(double g3, std::optional<double> ring_zeta) {
  require_nonnegative("gain", g3);
  if (ring_zeta) require_nonnegative("zeta", *ring_zeta);
  return {SchemeKind::RingRelative, g3, ring_zeta};
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::MomentumFeedback: return "momentum";
    case SchemeKind::ColdDamping: return "cold_damping";
    case SchemeKind::RingRelative: return "ring";
  }
  return "?";
}

SchemeKind scheme_from_string(const std::string& name) {
  if (name == "momentum" || name == "momentum_feedback") return SchemeKind::MomentumFeedback;
  if (name == "cold_damping" || name == "cold-damping") return SchemeKind::ColdDamping;
  if (name == "ring" || name == "ring_relative") return SchemeKind::RingRelative;
  throw DomainError("scheme", "unknown scheme '" + name + "'");
}

double momentum_gain_from_loop(double g_mf, double coupling_rate, double gamma_m) {
  return -4.0 * coupling_rate * g_mf / gamma_m;
}

double cold_damping_gain_from_loop(double g_cd, double coupling_rate, double omega_m,
                                   double gamma_m, double gamma_c) {
  return 4.0 * coupling_rate * omega_m * g_cd / (gamma_m * gamma_c);
}

double ring_gain_from_loop(double g_mf_minus, double ring_coupling_rate, double gamma_m) {
  return -4.0 * std::sqrt(2.0) * ring_coupling_rate * g_mf_minus / gamma_m;
}

double derive_zeta(const CavityParams& cav, const MechanicalParams& mech, double beta) {
  require_positive("gamma_m", mech.gamma_m);
  require_positive("gamma_c", cav.gamma_c);
  const double g = cav.coupling_g;
  return 16.0 * g * g * beta * beta / (mech.gamma_m * cav.gamma_c);
}

double derive_zeta_from_power(const CavityParams& cav, const MechanicalParams& mech, double power) {
  require_positive("gamma_m", mech.gamma_m);
  require_positive("gamma_c", cav.gamma_c);
  require_positive("omega_0", cav.omega_0);
  const double g = cav.coupling_g;
  return 64.0 * g * g * power / (cav.omega_0 * mech.gamma_m * cav.gamma_c * cav.gamma_c);
}

SemiclassicalSolution solve_semiclassical(const CavityParams& cav, const MechanicalParams& mech,
                                          bool zero_detuning) {
  require_positive("gamma_c", cav.gamma_c);
  require_positive("omega_m", mech.omega_m);
  const double e = cav.drive_amplitude();
  const double half = cav.gamma_c / 2.0;
  const double kappa = 2.0 * cav.coupling_g * cav.coupling_g / mech.omega_m;

  SemiclassicalSolution sol;
  if (zero_detuning) {
    const double beta = e / half;
    sol.beta = beta;
    sol.detuning = 0.0;
    sol.omega_0 = cav.omega_c + kappa * beta * beta;
    sol.intensity_roots = {beta * beta};
    sol.residual = std::abs(sol.beta - e / std::complex<double>(half, 0.0));
    return sol;
  }

  const double d0 = cav.bare_detuning();
  sol.omega_0 = cav.omega_0;
  std::vector<double> roots;
  if (kappa == 0.0) {
    roots.push_back(e * e / (half * half + d0 * d0));
  } else {
    // n * (half^2 + (d0 + kappa n)^2) = E^2 with n = |beta|^2
    Eigen::Vector4d coeffs;
    coeffs << -e * e, half * half + d0 * d0, 2.0 * d0 * kappa, kappa * kappa;
    Eigen::PolynomialSolver<double, 3> solver(coeffs);
    for (const auto& z : solver.roots()) {
      if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real()))) continue;
      double n = z.real();
      if (n < 0.0) continue;
      // Newton polish on the cubic
      for (int it = 0; it < 20; ++it) {
        const double dd = d0 + kappa * n;
        const double f = n * (half * half + dd * dd) - e * e;
        const double df = half * half + dd * dd + 2.0 * n * kappa * dd;
        if (df == 0.0) break;
        const double step = f / df;
        n -= step;
        if (std::abs(step) <= 1e-16 * std::abs(n)) break;
      }
      if (n >= 0.0) roots.push_back(n);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                              return std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-300);
                            }),
                roots.end());
  }
  if (roots.empty()) throw SolverError("semiclassical cubic has no real non-negative root");

  const double n = roots.front();
  const double delta = d0 + kappa * n;
  sol.beta = e / std::complex<double>(half, delta);
  sol.detuning = delta;
  sol.multistable = roots.size() > 1;
  sol.intensity_roots = roots;
  const double n_beta = std::norm(sol.beta);
  sol.residual =
      std::abs(sol.beta - e / std::complex<double>(half, d0 + kappa * n_beta));
  return sol;
}

RingSystem to_relative_frame(const SystemParams& two_mirror) {
  RingSystem ring;
  ring.relative = two_mirror;
  ring.relative.cav.coupling_g = std::sqrt(2.0) * two_mirror.cav.coupling_g;
  ring.relative.zeta = derive_zeta(ring.relative.cav, ring.relative.mech, two_mirror.beta);
  ring.center_of_mass = two_mirror;
  ring.center_of_mass.cav.coupling_g = 0.0;
  ring.center_of_mass.zeta = 0.0;
  return ring;
}

}  // namespace optofb
