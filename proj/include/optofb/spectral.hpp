// Frequency-domain evaluation of the stationary mirror moments.
//
// Units: omega_m = 1, gamma = 1/Q, Gamma = gamma (1 + g). Fourier convention
// x(t) = int dw/2pi e^{-iwt} x(w), so d/dt -> -iw. All noise spectra are
// symmetrized two-sided densities; a stationary second moment is
// int dw/2pi Re[H_i S H_j^*].
//
// Momentum feedback. After adiabatic elimination the mirror obeys
//   dQ = P - gamma g Q + n_Q,   dP = -Q - gamma P + n_P
// with n_Q = -g sqrt(gamma/zeta) Y_in + (g/2) sqrt(gamma/(eta zeta)) Y_in^eta
// and n_P = (1/2) sqrt(gamma zeta) X_in + W. Eliminating P gives
//   Q'' + Gamma Q' + (1 + gamma^2 g) Q = n_P + (n_Q' + gamma n_Q),
// so with D(w) = 1 + gamma^2 g - w^2 - i w Gamma
//   Q(w) = [(gamma - i w) n_Q + n_P] / D,   P(w) = [-n_Q + (gamma g - i w) n_P] / D.
// The (gamma - i w) factor carries the Y_in' + gamma Y_in terms of the
// displacement equation. Y_in and Y_in^eta have unit density and correlation
// sqrt(eta), so S_Q = gamma g^2 / (4 eta zeta) (the -1 cross term cancels the
// Y_in self term). Symmetrized cross spectra between X_in and the phase noises
// vanish. Integrands (per dw/2pi):
//   <Q^2>:        [(w^2 + gamma^2) S_Q + S_P] / |D|^2
//   <P^2>:        [S_Q + (w^2 + gamma^2 g^2) S_P] / |D|^2
//   <QP+PQ>/2:    [-gamma S_Q + gamma g S_P] / |D|^2
//
// Cold damping. Q'' + Gamma Q' + Q = n_P + f_fb with the derivative feedback
// noise density S_fb(w) = gamma g^2 / (4 eta zeta) |G(w)|^2. The resonance-peak
// approximation sets |G|^2 = omega_m^2 = 1. P = Q' so <QP+PQ> = 0.
//
// Back-action density S_P = gamma zeta / 4; thermal density
// S_P = (gamma/2) w coth(w / 2 theta) for |w| < varpi, zero above.
#pragma once

#include <complex>
#include <vector>

#include "optofb/model.hpp"
#include "optofb/quadrature.hpp"

namespace optofb {

enum class Moment { q2, p2, qp };
enum class NoiseSource { all, back_action, feedback, thermal };
enum class ThermalModel { full_coth, classical };

/// Detection/feedback filter for cold damping.
enum class FeedbackFilter {
  resonance_peak,    ///< |G|^2 = omega_m^2
  ideal_derivative,  ///< |G|^2 = w^2
  band_limited,      ///< |G|^2 = w^2 |B(w)|^2 with a band-pass B around omega_m
};
enum class FilterShape { brick_wall, lorentzian, butterworth2 };

struct SpectralOptions {
  QuadratureOptions quad{};
  ThermalModel thermal = ThermalModel::full_coth;
  FeedbackFilter filter = FeedbackFilter::resonance_peak;
  FilterShape shape = FilterShape::butterworth2;
  double band_halfwidth = 0.0;  ///< passband omega_m +- band_halfwidth (band_limited only)
};

struct SpectralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int n_evaluations = 0;
  std::vector<double> split_points;
  bool converged = true;
};

/// Mechanical susceptibility omega_m / (Omega^2 - w^2 + i w Gamma), where
/// Omega^2 = omega_m^2 + gamma^2 g for momentum feedback.
class Susceptibility {
public:
  Susceptibility(const FeedbackScheme& scheme, double quality);

  std::complex<double> operator()(double w) const;
  double norm_sq(double w) const;
  double resonance() const { return std::sqrt(omega_sq_); }
  double width() const { return width_; }
  const FeedbackScheme& scheme() const { return scheme_; }

private:
  FeedbackScheme scheme_;
  double omega_sq_;
  double width_;
};

/// Symmetrized spectral density of one noise source, as it enters the
/// equation it drives (n_P, or n_Q for momentum-feedback shot noise).
class NoiseSpectrum {
public:
  NoiseSpectrum(NoiseSource kind, const FeedbackScheme& scheme, const SystemParams& sys,
                const SpectralOptions& opts);

  double operator()(double w) const;
  NoiseSource kind() const { return kind_; }
  /// True when the density drives the position equation (momentum-feedback shot noise).
  bool drives_position() const { return drives_position_; }
  /// Frequency above which the density vanishes (infinity if none).
  double cutoff() const { return cutoff_; }

private:
  NoiseSource kind_;
  double gamma_;
  double level_ = 0.0;
  double theta_ = 0.0;
  double cutoff_;
  bool drives_position_ = false;
  bool filtered_ = false;
  SpectralOptions opts_;
};

/// Integrand f(w) with <moment> = int_{-inf}^{inf} f(w) dw (the 1/2pi is included).
double spectral_integrand(const FeedbackScheme& scheme, Moment moment, NoiseSource source,
                          const SystemParams& sys, double w, const SpectralOptions& opts = {});

/// Quadrature of the moment over all frequencies for one source (or all).
/// RingRelative uses scheme.ring_zeta (or sys.zeta) and momentum-feedback kernels.
SpectralResult variance_integral(const FeedbackScheme& scheme, Moment moment, NoiseSource source,
                                 const SystemParams& sys, const SpectralOptions& opts = {});

struct LogCorrectionProbe {
  std::vector<double> cutoff_ratios;
  std::vector<double> p2_residuals;  ///< p2(varpi) - closed form without log term
  std::vector<double> q2_residuals;
  double p2_slope = 0.0;             ///< fitted d residual / d ln varpi
  double q2_slope = 0.0;
  double reference_slope = 0.0;      ///< gamma_m / (pi omega_m)
  double slope_ratio() const { return p2_slope / reference_slope; }
};

/// Fits the cutoff dependence of <P^2> against ln varpi. The residual is the
/// full-coth thermal integral (with cutoff) minus its classical value,
/// integrated as a single difference integrand; back-action and feedback
/// terms do not depend on the cutoff. Refuses ladders spanning less than two
/// decades or outside hbar varpi >> k_B T >> hbar omega_m.
LogCorrectionProbe log_correction_probe(const SystemParams& sys, const FeedbackScheme& scheme,
                                        const std::vector<double>& cutoff_ratio_ladder,
                                        const QuadratureOptions& quad = {});

struct BandFilterEffect {
  SpectralResult filtered;
  double flat_value = 0.0;   ///< resonance-peak value of the same feedback-induced moment
  double deviation = 0.0;    ///< |filtered - flat| / flat
  bool inside_regime = true; ///< band_halfwidth > gamma_m (1 + g2)
};

/// Recomputes the cold-damping feedback-induced moment with a band-limited
/// derivative filter instead of the resonance-peak approximation.
BandFilterEffect detection_band_filter_effect(const SystemParams& sys, double g2,
                                              double band_halfwidth, FilterShape shape,
                                              Moment moment = Moment::q2);

}  // namespace optofb
