// Run configuration: flat `key = value` files plus command-line overrides.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optofb/langevin.hpp"
#include "optofb/model.hpp"

namespace optofb {

/// Parse error carrying the source location. `key()` is empty for syntax errors.
class ConfigError : public DomainError {
public:
  ConfigError(const std::string& source, int line, const std::string& key, const std::string& what);
  int line() const noexcept { return line_; }

private:
  int line_;
};

enum class Method { analytic, spectral, lyapunov, ensemble };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SweepSpec {
  std::string variable = "zeta";
  bool log_scale = true;
  double min = 1.0;
  double max = 1e9;
  int points = 41;
};

struct RunConfig {
  // system, as dimensionless ratios
  double theta = 1e5;
  double eta = 0.8;
  double quality = 1e4;
  double cutoff_ratio = 100.0;
  double gamma_c_over_omega_m = 1e4;
  double zeta = 1.0;
  SchemeKind scheme = SchemeKind::ColdDamping;
  double gain = 0.0;
  std::optional<double> ring_zeta;
  bool log_correction = false;

  std::optional<SweepSpec> sweep;
  std::string series_variable = "gain";
  std::vector<double> series;  ///< one output series per value; empty means a single series

  std::vector<Method> methods{Method::analytic};
  std::string out;
  std::uint64_t seed = 1;

  // simulation
  SdeForm form = SdeForm::adiabatic;
  double dt = 0.0;  ///< 0: 0.05 / fastest rate
  long n_steps = 0;  ///< 0: 50 relaxation times
  std::optional<long> burn_in_steps;
  int n_traj = 200;
  int substeps = 1;
  int noise_substeps = 0;
  Integrator integrator = Integrator::exact;
  int threads = 0;
  std::string dump_dir;
  int dump_count = 0;

  // tolerances
  double tol_rel = 1e-3;    ///< analytic vs spectral / lyapunov
  double tol_sigma = 3.0;   ///< ensemble vs lyapunov, in standard errors
  double quad_rel_tol = 1e-10;
};

/// Names of all recognized keys.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws DomainError naming the key.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Checks every parameter domain; the exception names the offending key.
void validate(const RunConfig& cfg);

SystemParams make_system(const RunConfig& cfg);
FeedbackScheme make_scheme(const RunConfig& cfg);
std::vector<double> sweep_values(const SweepSpec& spec);

/// Applies a numeric value to a sweepable variable:
/// zeta, gain, quality, theta, eta, cutoff_ratio, gamma_c_over_omega_m.
void set_variable(RunConfig& cfg, const std::string& variable, double value);
bool is_sweepable(const std::string& variable);

}  // namespace optofb
