#include "optofb/steady.hpp"

#include <cmath>
#include <numbers>

#include "optofb/minimize.hpp"

namespace optofb {

namespace {

void check_inputs(const SystemParams& sys, double gain) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) throw DomainError("gain", "must be non-negative");
  if (!(sys.zeta >= 0.0)) throw DomainError("zeta", "must be non-negative");
  if (!(sys.bath.eta > 0.0 && sys.bath.eta <= 1.0)) throw DomainError("eta", "must lie in (0, 1]");
  if (!(sys.bath.theta >= 0.0)) throw DomainError("theta", "must be non-negative");
  if (gain > 0.0 && sys.zeta == 0.0)
    throw DomainError("zeta", "feedback noise diverges at zero input power");
}

// Feedback-noise prefactor g^2 / (8 eta zeta); zero without feedback.
double feedback_prefactor(double gain, double eta, double zeta) {
  return gain == 0.0 ? 0.0 : gain * gain / (8.0 * eta * zeta);
}

void finish(SteadyState& s) {
  s.q2 = s.q2_parts.total();
  s.p2 = s.p2_parts.total();
  s.qp_sym = s.qp_parts.total();
  s.energy_units = 2.0 * (s.q2 + s.p2);
  s.ellipse_angle = 0.5 * std::atan2(2.0 * s.qp_sym, s.q2 - s.p2);
  s.below_uncertainty_bound = s.q2 * s.p2 - s.qp_sym * s.qp_sym < 1.0 / 16.0;

  const double scale = std::max(std::abs(s.q2), std::abs(s.p2));
  const bool thermal_form =
      std::abs(s.q2 - s.p2) <= 1e-9 * scale && std::abs(s.qp_sym) <= 1e-9 * scale;
  if (thermal_form) s.occupancy = 2.0 * s.q2 - 0.5;
}

SteadyState momentum_form(double zeta, double gain, double quality, const BathParams& bath,
                          bool log_correction) {
  SteadyState s;
  const double q2f = quality * quality;
  const double g = gain;
  const double denom = (1.0 + g) * (q2f + g);
  const double fb = feedback_prefactor(g, bath.eta, zeta);

  s.q2_parts.back_action = zeta * q2f / (8.0 * denom);
  s.q2_parts.feedback_induced = fb * (1.0 + q2f + g) / denom;
  s.q2_parts.brownian = 0.5 * bath.theta * q2f / denom;

  s.p2_parts.back_action = zeta * (q2f + g * g + g) / (8.0 * denom);
  s.p2_parts.feedback_induced = fb * q2f / denom;
  s.p2_parts.brownian = 0.5 * bath.theta * (g * g + q2f + g) / denom;

  s.qp_parts.back_action = zeta / 8.0 * g * quality / denom;
  s.qp_parts.brownian = 0.5 * bath.theta * g * quality / denom;
  s.qp_parts.feedback_induced = -fb * quality / denom;

  if (log_correction) {
    s.log_term = log_correction_term(quality, bath.cutoff_ratio, &s.warnings);
    s.p2_parts.brownian += s.log_term;
  }
  finish(s);
  return s;
}

}  // namespace

double log_correction_term(double quality, double cutoff_ratio, std::vector<std::string>* warnings) {
  if (!(cutoff_ratio > 2.0 * std::numbers::pi)) {
    if (warnings)
      warnings->push_back("cutoff_ratio <= 2 pi: logarithmic correction clamped to 0");
    return 0.0;
  }
  return std::log(cutoff_ratio / (2.0 * std::numbers::pi)) / (std::numbers::pi * quality);
}

SteadyState cold_damping_state(const SystemParams& sys, double g2, bool log_correction) {
  check_inputs(sys, g2);
  SteadyState s;
  const double damp = 1.0 + g2;
  const double ba = sys.zeta / (8.0 * damp);
  const double fb = feedback_prefactor(g2, sys.bath.eta, sys.zeta) / damp;
  const double bm = 0.5 * sys.bath.theta / damp;
  s.q2_parts = {ba, fb, bm};
  s.p2_parts = {ba, fb, bm};
  if (log_correction) {
    s.log_term = log_correction_term(sys.quality(), sys.bath.cutoff_ratio, &s.warnings);
    s.p2_parts.brownian += s.log_term;
  }
  finish(s);
  return s;
}

SteadyState momentum_feedback_state(const SystemParams& sys, double g1, bool log_correction) {
  check_inputs(sys, g1);
  return momentum_form(sys.zeta, g1, sys.quality(), sys.bath, log_correction);
}

SteadyState ring_relative_state(const SystemParams& sys, const FeedbackScheme& scheme,
                                bool log_correction) {
  SystemParams rel = sys;
  if (scheme.ring_zeta) rel.zeta = *scheme.ring_zeta;
  check_inputs(rel, scheme.gain);
  return momentum_form(rel.zeta, scheme.gain, rel.quality(), rel.bath, log_correction);
}

SteadyState steady_state(const SystemParams& sys, const FeedbackScheme& scheme,
                         bool log_correction) {
  switch (scheme.kind) {
    case SchemeKind::ColdDamping: return cold_damping_state(sys, scheme.gain, log_correction);
    case SchemeKind::MomentumFeedback:
      return momentum_feedback_state(sys, scheme.gain, log_correction);
    case SchemeKind::RingRelative: return ring_relative_state(sys, scheme, log_correction);
  }
  throw DomainError("scheme", "unsupported scheme");
}

double momentum_feedback_energy(const SystemParams& sys, double g1) {
  return momentum_feedback_state(sys, g1).energy_units;
}

EnergyOptimum cold_damping_optimum(double g2, double eta, double theta) {
  const auto bath = BathParams::make(theta, 100.0, eta);
  const double qf = 1e4;  // cold-damping moments do not depend on Q without the log term
  EnergyOptimum out;
  out.zeta_analytic = g2 / std::sqrt(eta);
  if (g2 == 0.0) {
    out.interior = false;
    out.zeta_opt = 0.0;
    out.energy_units = cold_damping_state(SystemParams::from_dimensionless(qf, 0.0, bath), 0.0)
                           .energy_units;
    out.energy_analytic = out.energy_units;
    return out;
  }
  auto noise_energy = [&](double zeta) {
    const auto s = cold_damping_state(SystemParams::from_dimensionless(qf, zeta, bath), g2);
    return 2.0 * (s.q2_parts.back_action + s.q2_parts.feedback_induced + s.p2_parts.back_action +
                  s.p2_parts.feedback_induced);
  };
  const auto m = minimize_positive(noise_energy, out.zeta_analytic);
  out.zeta_opt = m.x;
  out.evaluations = m.evaluations;
  out.energy_units =
      cold_damping_state(SystemParams::from_dimensionless(qf, m.x, bath), g2).energy_units;
  out.energy_analytic = g2 / (1.0 + g2) * (1.0 / std::sqrt(eta) + 2.0 * theta / g2);
  return out;
}

double momentum_feedback_exact_zeta_opt(double g1, double eta, double quality) {
  const double q2f = quality * quality;
  return g1 * std::sqrt((1.0 + 2.0 * q2f + g1) / (eta * (g1 * g1 + 2.0 * q2f + g1)));
}

EnergyOptimum momentum_feedback_optimum(double g1, double eta, double theta, double quality) {
  const auto bath = BathParams::make(theta, 100.0, eta);
  EnergyOptimum out;
  out.zeta_analytic = g1 / std::sqrt(eta);
  if (g1 == 0.0) {
    out.interior = false;
    out.zeta_opt = 0.0;
    out.energy_units =
        momentum_feedback_state(SystemParams::from_dimensionless(quality, 0.0, bath), 0.0)
            .energy_units;
    out.energy_analytic = out.energy_units;
    return out;
  }
  auto noise_energy = [&](double zeta) {
    const auto s =
        momentum_feedback_state(SystemParams::from_dimensionless(quality, zeta, bath), g1);
    return 2.0 * (s.q2_parts.back_action + s.q2_parts.feedback_induced + s.p2_parts.back_action +
                  s.p2_parts.feedback_induced);
  };
  const auto m = minimize_positive(noise_energy, out.zeta_analytic);
  out.zeta_opt = m.x;
  out.evaluations = m.evaluations;
  out.energy_units =
      momentum_feedback_state(SystemParams::from_dimensionless(quality, m.x, bath), g1)
          .energy_units;
  out.energy_analytic = 1.0 / std::sqrt(eta) + 2.0 * theta / g1;
  return out;
}

double contractive_threshold(const SystemParams& sys) {
  if (!(sys.zeta > 0.0)) throw DomainError("zeta", "must be positive");
  return sys.bath.eta * sys.zeta * (sys.zeta + 4.0 * sys.bath.theta);
}

double squeezing_optimal_zeta(double g, double quality, double eta) {
  return g / quality * std::sqrt((1.0 + quality * quality + g) / eta);
}

SqueezingMinimum squeezing_minimum(double g1, double quality, double eta, double theta) {
  if (!(g1 > 0.0)) throw DomainError("gain", "must be positive");
  const auto bath = BathParams::make(theta, 100.0, eta);
  const double q2f = quality * quality;
  const double denom = (1.0 + g1) * (q2f + g1);
  SqueezingMinimum out;
  out.q2_min = g1 * quality * std::sqrt(1.0 + q2f + g1) / (4.0 * std::sqrt(eta) * denom) +
               0.5 * theta * q2f / denom;
  out.zeta_at_min = squeezing_optimal_zeta(g1, quality, eta);

  auto noise_q2 = [&](double zeta) {
    const auto s =
        momentum_feedback_state(SystemParams::from_dimensionless(quality, zeta, bath), g1);
    return s.q2_parts.back_action + s.q2_parts.feedback_induced;
  };
  const auto m = minimize_positive(noise_q2, out.zeta_at_min);
  out.zeta_numeric = m.x;
  out.q2_min_numeric =
      momentum_feedback_state(SystemParams::from_dimensionless(quality, m.x, bath), g1).q2;
  return out;
}

NonclassicalityReport nonclassicality(const SystemParams& sys, double g1) {
  NonclassicalityReport r;
  const auto s = momentum_feedback_state(sys, g1);
  r.contractive_gain_threshold = contractive_threshold(sys);
  r.contractive = s.qp_sym < 0.0;
  r.squeezed = s.q2 < 0.25;
  r.squeezing_zeta = g1 > 0.0 ? squeezing_optimal_zeta(g1, sys.quality(), sys.bath.eta) : 0.0;
  return r;
}

NonclassicalityReport entanglement_marker(const RingSystem& ring, double g3, double cutoff_ratio,
                                          std::optional<double> ring_zeta) {
  if (!(g3 >= 0.0)) throw DomainError("gain", "must be non-negative");
  const auto& rel = ring.relative;
  NonclassicalityReport r;
  double zt = 0.0;
  if (ring_zeta) {
    zt = *ring_zeta;
  } else if (g3 > 0.0) {
    zt = squeezing_optimal_zeta(g3, rel.quality(), rel.bath.eta);
  } else {
    zt = rel.zeta;
  }
  r.ring_zeta = zt;
  BathParams bath = rel.bath;
  bath.cutoff_ratio = cutoff_ratio;

  const auto qm = ring_relative_state(rel, FeedbackScheme::ring(g3, zt));
  r.q_minus2 = qm.q2;
  r.p_plus2 = 0.5 * bath.theta + log_correction_term(rel.quality(), cutoff_ratio, &r.warnings);
  const double marker = 16.0 * r.q_minus2 * r.p_plus2;
  r.entanglement_marker = marker;
  r.entangled = marker < 1.0;
  r.contractive = qm.qp_sym < 0.0;
  r.squeezed = qm.q2 < 0.25;
  r.squeezing_zeta = zt;
  if (zt > 0.0) {
    SystemParams probe = rel;
    probe.zeta = zt;
    r.contractive_gain_threshold = contractive_threshold(probe);
  }
  return r;
}

}  // namespace optofb
