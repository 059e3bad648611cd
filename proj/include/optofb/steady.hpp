// Closed-form stationary moments of the feedback-cooled mirror.
//
// All variances are dimensionless ([Q, P] = i/2) and use the classical thermal
// approximation coth(w / 2 theta) ~ 2 theta / w. The cutoff-dependent
// logarithmic term of <P^2> is opt-in.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optofb/model.hpp"

namespace optofb {

/// Contributions of the three noise sources to one second moment.
struct NoiseBreakdown {
  double back_action = 0.0;
  double feedback_induced = 0.0;
  double brownian = 0.0;

  double total() const { return back_action + feedback_induced + brownian; }
};

struct SteadyState {
  double q2 = 0.0;
  double p2 = 0.0;
  double qp_sym = 0.0;  ///< <QP + PQ> / 2
  NoiseBreakdown q2_parts;
  NoiseBreakdown p2_parts;  ///< brownian includes log_term
  NoiseBreakdown qp_parts;
  double log_term = 0.0;
  double energy_units = 0.0;         ///< 2 U / (hbar omega_m) = 2 (<Q^2> + <P^2>)
  std::optional<double> occupancy;   ///< only for thermal-form states
  double ellipse_angle = 0.0;        ///< rotation of the phase-space ellipse from the Q axis
  bool below_uncertainty_bound = false;  ///< q2 p2 - qp^2 < 1/16: outside formula validity
  std::vector<std::string> warnings;
};

/// (gamma_m / pi omega_m) ln(cutoff_ratio / 2 pi). Clamped to zero (with a
/// warning appended) when cutoff_ratio <= 2 pi.
double log_correction_term(double quality, double cutoff_ratio,
                           std::vector<std::string>* warnings = nullptr);

SteadyState cold_damping_state(const SystemParams& sys, double g2, bool log_correction = false);
SteadyState momentum_feedback_state(const SystemParams& sys, double g1,
                                    bool log_correction = false);
/// Relative-coordinate state of the ring cavity (momentum feedback on Q_-).
/// Uses `scheme.ring_zeta` when set, otherwise `sys.zeta`.
SteadyState ring_relative_state(const SystemParams& sys, const FeedbackScheme& scheme,
                                bool log_correction = false);

SteadyState steady_state(const SystemParams& sys, const FeedbackScheme& scheme,
                         bool log_correction = false);

double momentum_feedback_energy(const SystemParams& sys, double g1);

struct EnergyOptimum {
  double zeta_opt = 0.0;         ///< numeric minimizer (0 when no interior minimum exists)
  double zeta_analytic = 0.0;    ///< g / sqrt(eta)
  double energy_units = 0.0;     ///< energy at zeta_opt
  double energy_analytic = 0.0;  ///< closed-form energy at zeta_analytic
  bool interior = true;
  int evaluations = 0;
};

/// Optimal input power for cold damping. The numeric search minimizes the
/// zeta-dependent part of the energy (the Brownian part does not depend on zeta).
EnergyOptimum cold_damping_optimum(double g2, double eta, double theta);
EnergyOptimum momentum_feedback_optimum(double g1, double eta, double theta, double quality);

/// Exact minimizer of the momentum-feedback energy over zeta:
/// g1 sqrt((1 + 2Q^2 + g1) / (eta (g1^2 + 2Q^2 + g1))).
double momentum_feedback_exact_zeta_opt(double g1, double eta, double quality);

/// Gain above which <QP + PQ> turns negative: eta zeta (zeta + 4 theta).
double contractive_threshold(const SystemParams& sys);

struct SqueezingMinimum {
  double q2_min = 0.0;
  double zeta_at_min = 0.0;
  double q2_min_numeric = 0.0;
  double zeta_numeric = 0.0;
};

/// Minimum over zeta of the momentum-feedback <Q^2> at fixed gain and Q.
SqueezingMinimum squeezing_minimum(double g1, double quality, double eta, double theta);

/// zeta at which <Q^2> is minimal: (g / Q) sqrt((1 + Q^2 + g) / eta).
double squeezing_optimal_zeta(double g, double quality, double eta);

struct NonclassicalityReport {
  bool contractive = false;
  double contractive_gain_threshold = 0.0;
  bool squeezed = false;
  double squeezing_zeta = 0.0;
  std::optional<double> entanglement_marker;
  bool entangled = false;
  double q_minus2 = 0.0;
  double p_plus2 = 0.0;
  double ring_zeta = 0.0;
  std::vector<std::string> warnings;
};

/// Contractive and squeezing flags for a single-mirror momentum-feedback state.
NonclassicalityReport nonclassicality(const SystemParams& sys, double g1);

/// Product criterion E = 16 <Q_-^2> <P_+^2> for the ring cavity. <Q_-^2> is
/// evaluated at `ring_zeta` if given, else at the optimal zeta~; <P_+^2> is the
/// Brownian value including the logarithmic term.
NonclassicalityReport entanglement_marker(const RingSystem& ring, double g3, double cutoff_ratio,
                                          std::optional<double> ring_zeta = std::nullopt);

}  // namespace optofb
