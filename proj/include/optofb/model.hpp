// Physical parameters of a feedback-cooled optomechanical oscillator.
//
// Internal units: hbar = 1 and all rates are measured relative to the
// mechanical frequency omega_m. Temperature only enters through
// theta = k_B T / (hbar omega_m).
#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace optofb {

/// Thrown when a parameter lies outside its physical domain. `key()` names the
/// offending parameter so front ends can point at it.
class DomainError : public std::invalid_argument {
public:
  DomainError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class SolverError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MechanicalParams {
  double omega_m = 1.0;
  double gamma_m = 1e-4;

  static MechanicalParams make(double omega_m, double gamma_m);
  static MechanicalParams from_quality(double quality);

  double quality() const { return omega_m / gamma_m; }
  /// gamma_m in units of omega_m, i.e. 1/Q.
  double gamma_ratio() const { return gamma_m / omega_m; }
};

/// Drive specified as the amplitude E entering the cavity equation.
struct DriveAmplitude {
  double E = 0.0;
};

/// Drive specified as laser input power; E = sqrt(power * gamma_c / (hbar omega_0)).
struct InputPower {
  double power = 0.0;
};

struct CavityParams {
  double omega_c = 0.0;
  double omega_0 = 0.0;
  double gamma_c = 1e4;
  double coupling_g = 0.0;
  std::variant<DriveAmplitude, InputPower> drive = DriveAmplitude{};

  static CavityParams make(double omega_c, double omega_0, double gamma_c, double coupling_g,
                           std::variant<DriveAmplitude, InputPower> drive = DriveAmplitude{});

  double drive_amplitude() const;
  double input_power() const;
  double bare_detuning() const { return omega_c - omega_0; }
};

struct BathParams {
  double theta = 1e5;         ///< k_B T / hbar omega_m
  double cutoff_ratio = 100;  ///< hbar varpi / k_B T
  double eta = 0.8;           ///< homodyne detection efficiency

  static BathParams make(double theta, double cutoff_ratio, double eta);

  /// Reservoir cutoff frequency in units of omega_m.
  double cutoff_frequency() const { return cutoff_ratio * theta; }
};

struct SystemParams {
  MechanicalParams mech;
  CavityParams cav;
  BathParams bath;
  double beta = 0.0;  ///< real semiclassical amplitude (zero-detuning working point)
  double zeta = 0.0;  ///< 16 G^2 beta^2 / (gamma_m gamma_c)

  /// Builds a system from G and beta; zeta is derived.
  static SystemParams from_coupling(MechanicalParams mech, CavityParams cav, BathParams bath,
                                    double beta);

  /// Builds a system from the dimensionless groups. The working point is
  /// normalized to beta = 1 and G is chosen to reproduce zeta.
  static SystemParams from_dimensionless(double quality, double zeta, BathParams bath,
                                         double gamma_c_over_omega_m = 1e4);

  double quality() const { return mech.quality(); }
  /// G beta in units of omega_m.
  double coupling_rate() const { return cav.coupling_g * beta / mech.omega_m; }
  double gamma_c_ratio() const { return cav.gamma_c / mech.omega_m; }
};

enum class SchemeKind { MomentumFeedback, ColdDamping, RingRelative };

struct FeedbackScheme {
  SchemeKind kind = SchemeKind::ColdDamping;
  double gain = 0.0;
  /// Rescaled ring power zeta~; only meaningful for RingRelative.
  std::optional<double> ring_zeta;

  static FeedbackScheme momentum(double g1);
  static FeedbackScheme cold_damping(double g2);
  static FeedbackScheme ring(double g3, std::optional<double> ring_zeta = std::nullopt);
};

std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

// Maps between the bare loop gains and the rescaled dimensionless gains.
double momentum_gain_from_loop(double g_mf, double coupling_rate, double gamma_m);
double cold_damping_gain_from_loop(double g_cd, double coupling_rate, double omega_m,
                                   double gamma_m, double gamma_c);
double ring_gain_from_loop(double g_mf_minus, double ring_coupling_rate, double gamma_m);

/// zeta = 16 G^2 beta^2 / (gamma_m gamma_c).
double derive_zeta(const CavityParams& cav, const MechanicalParams& mech, double beta);
/// zeta = 64 G^2 power / (hbar omega_0 gamma_m gamma_c^2), hbar = 1.
double derive_zeta_from_power(const CavityParams& cav, const MechanicalParams& mech, double power);

struct SemiclassicalSolution {
  std::complex<double> beta;
  double detuning = 0.0;       ///< effective detuning omega_c - omega_0 + 2 G^2 |beta|^2 / omega_m
  double omega_0 = 0.0;        ///< drive frequency used (tuned when zero detuning was requested)
  double residual = 0.0;       ///< |beta - E / (gamma_c/2 + i detuning)|
  bool multistable = false;
  std::vector<double> intensity_roots;  ///< all real positive |beta|^2 roots found
};

SemiclassicalSolution solve_semiclassical(const CavityParams& cav, const MechanicalParams& mech,
                                          bool zero_detuning);

/// Ring cavity reduced to the relative coordinate. The center-of-mass channel
/// sees only the thermal bath.
struct RingSystem {
  SystemParams relative;
  SystemParams center_of_mass;
  bool center_of_mass_thermal_only = true;
};

/// `two_mirror.cav.coupling_g` carries the ring coupling G~ and `beta` carries beta~.
RingSystem to_relative_frame(const SystemParams& two_mirror);

}  // namespace optofb
