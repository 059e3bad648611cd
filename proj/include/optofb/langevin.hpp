// Time-domain simulation of the linearized feedback Langevin equations.
//
// Quantum input noises are replaced by classical white noises with the same
// symmetrized spectra, so every second moment of the linear dynamics is
// reproduced. Independent unit noises (columns of the noise matrix):
//   0: Y_in   1: auxiliary detection noise (Y_in^eta = sqrt(eta) Y_in + sqrt(1-eta) aux)
//   2: X_in   3: thermal force W (two-sided density gamma_m theta)
//   4: resonance-peak cold-damping feedback noise (adiabatic cold damping only)
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optofb/linalg.hpp"
#include "optofb/model.hpp"

namespace optofb {

enum class SdeForm { full, adiabatic };

struct LinearSDE {
  int dim = 2;
  Matrix drift;
  Matrix noise;
  std::vector<std::string> labels;
  SchemeKind scheme = SchemeKind::ColdDamping;
  SdeForm form = SdeForm::adiabatic;
  double gain = 0.0;
  double damping = 0.0;       ///< (1 + g) gamma_m
  double fastest_rate = 1.0;  ///< sets the largest admissible time step
  double slowest_rate = 0.0;  ///< min |Re lambda| of the drift
  std::vector<std::string> warnings;
};

struct SdeOptions {
  /// Corner of the filtered differentiator used by the full cold-damping form.
  /// Zero selects 100 max(omega_m, (1 + g) gamma_m).
  double differentiator_bandwidth = 0.0;
};

/// Builds drift and noise matrices. The full cold-damping form carries a fifth
/// state: the low-pass memory of a first-order filtered differentiator acting
/// on the homodyne current. Throws SolverError if the drift is not Hurwitz.
LinearSDE build_sde(const SystemParams& sys, const FeedbackScheme& scheme, SdeForm form,
                    const SdeOptions& opts = {});

/// Stationary covariance from A S + S A^T + B B^T = 0.
Matrix stationary_covariance_lyapunov(const LinearSDE& sde);

enum class Integrator { exact, euler_maruyama };

struct EnsembleOptions {
  double dt = 0.01;
  long n_steps = 100000;                ///< recorded steps after burn-in
  int n_traj = 200;
  std::uint64_t seed = 1;               ///< trajectory i uses seed + i
  std::optional<long> burn_in_steps;    ///< default: 10 covariance relaxation times
  int substeps = 1;                     ///< internal steps of dt/substeps per recorded step
  /// Unit noise draws per recorded step (0: substeps); a multiple of substeps.
  /// Runs with equal noise_substeps and seed follow the same noise path.
  int noise_substeps = 0;
  Integrator integrator = Integrator::exact;
  int threads = 0;                      ///< 0: hardware concurrency
  int dump_count = 0;                   ///< trajectories written as CSV
  long dump_stride = 1;
  std::string dump_dir;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct EnsembleStats {
  int n_traj = 0;
  long burn_in_steps = 0;
  Estimate q2;
  Estimate p2;
  Estimate qp;
  double decay_rate = 0.0;             ///< fitted decay rate of |<x(t) Q(0)>|^2
  double autocorrelation_time = 0.0;   ///< 1 / decay_rate
};

/// Runs n_traj independent trajectories from x = 0. Moments are time averages
/// over every internal step after burn-in; standard errors come from the
/// spread of per-trajectory means. Refuses dt > 0.05 / fastest_rate.
EnsembleStats simulate_ensemble(const LinearSDE& sde, const EnsembleOptions& opts);

struct AdiabaticDeviation {
  double gamma_c = 0.0;
  double q2 = 0.0;  ///< relative deviation of the full form from the adiabatic form
  double p2 = 0.0;
  double qp = 0.0;  ///< |delta qp| / sqrt(q2 p2)
  bool inside_regime = true;
};

std::vector<AdiabaticDeviation> adiabatic_validity_check(const SystemParams& sys,
                                                         const FeedbackScheme& scheme,
                                                         const std::vector<double>& gamma_c_ladder);

}  // namespace optofb
