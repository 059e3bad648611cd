#include "optofb/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

namespace optofb {

namespace {

constexpr int kNoiseCols = 5;

void require_hurwitz(LinearSDE& sde) {
  Eigen::EigenSolver<Matrix> es(sde.drift, false);
  const auto ev = es.eigenvalues();
  const double abscissa = ev.real().maxCoeff();
  if (!(abscissa < 0.0)) {
    std::ostringstream msg;
    msg << "drift matrix is not Hurwitz; eigenvalues:";
    for (Eigen::Index i = 0; i < ev.size(); ++i) msg << " (" << ev[i].real() << "," << ev[i].imag() << ")";
    throw SolverError(msg.str());
  }
  sde.slowest_rate = -abscissa;
}

}  // namespace

LinearSDE build_sde(const SystemParams& sys, const FeedbackScheme& scheme, SdeForm form,
                    const SdeOptions& opts) {
  const double g = scheme.gain;
  if (!(g >= 0.0)) throw DomainError("gain", "must be non-negative");
  double zeta = sys.zeta;
  if (scheme.kind == SchemeKind::RingRelative && scheme.ring_zeta) zeta = *scheme.ring_zeta;
  if (g > 0.0 && !(zeta > 0.0))
    throw DomainError("zeta", "feedback noise diverges at zero input power");

  const double gamma = 1.0 / sys.quality();
  const double eta = sys.bath.eta;
  const double theta = sys.bath.theta;
  const double se = std::sqrt(eta);
  const double sa = std::sqrt(1.0 - eta);
  const bool cold = scheme.kind == SchemeKind::ColdDamping;

  LinearSDE sde;
  sde.scheme = scheme.kind;
  sde.form = form;
  sde.gain = g;
  sde.damping = gamma * (1.0 + g);

  if (form == SdeForm::adiabatic) {
    sde.dim = 2;
    sde.labels = {"Q", "P"};
    sde.drift = Matrix::Zero(2, 2);
    sde.noise = Matrix::Zero(2, kNoiseCols);
    sde.drift(0, 1) = 1.0;
    sde.drift(1, 0) = -1.0;
    sde.noise(1, 2) = 0.5 * std::sqrt(gamma * zeta);
    sde.noise(1, 3) = std::sqrt(gamma * theta);
    if (cold) {
      sde.drift(1, 1) = -gamma * (1.0 + g);
      if (g > 0.0) sde.noise(1, 4) = std::sqrt(gamma * g * g / (4.0 * eta * zeta));
    } else {
      sde.drift(0, 0) = -gamma * g;
      sde.drift(1, 1) = -gamma;
      if (g > 0.0) {
        const double a = -g * std::sqrt(gamma / zeta);
        const double b = 0.5 * g * std::sqrt(gamma / (eta * zeta));
        sde.noise(0, 0) = a + b * se;
        sde.noise(0, 1) = b * sa;
      }
    }
    sde.fastest_rate = std::max(1.0, sde.damping);
    require_hurwitz(sde);
    return sde;
  }

  const double gc = sys.gamma_c_ratio();
  const double gb = std::sqrt(zeta * gamma * gc) / 4.0;  // G beta consistent with zeta
  if (gc < 10.0 * std::max(1.0, gb))
    sde.warnings.push_back("gamma_c is not much larger than omega_m and G beta");

  const int dim = cold ? 5 : 4;
  sde.dim = dim;
  sde.drift = Matrix::Zero(dim, dim);
  sde.noise = Matrix::Zero(dim, kNoiseCols);
  auto& A = sde.drift;
  auto& B = sde.noise;
  enum { Q = 0, P = 1, Y = 2, X = 3, Z = 4 };

  A(Q, P) = 1.0;
  A(P, Q) = -1.0;
  A(P, P) = -gamma;
  A(P, X) = 2.0 * gb;
  A(Y, Y) = -0.5 * gc;
  A(Y, Q) = 2.0 * gb;
  A(X, X) = -0.5 * gc;
  B(Y, 0) = 0.5 * std::sqrt(gc);
  B(X, 2) = 0.5 * std::sqrt(gc);
  B(P, 3) = std::sqrt(gamma * theta);
  sde.fastest_rate = std::max({1.0, gc, sde.damping});

  if (cold) {
    sde.labels = {"Q", "P", "Y", "X", "z"};
    const double wf = opts.differentiator_bandwidth > 0.0
                          ? opts.differentiator_bandwidth
                          : 100.0 * std::max(1.0, sde.damping);
    const double gcd = g > 0.0 ? g * gamma * gc / (4.0 * gb) : 0.0;
    const double k = gcd / (2.0 * eta * std::sqrt(gc));
    // u = wf (Y_out - z), Y_out = 2 eta sqrt(gc) Y - sqrt(eta) Y_in^eta; force -k u, z' = u
    const double yo = 2.0 * eta * std::sqrt(gc);
    A(P, Y) += -k * wf * yo;
    A(P, Z) += k * wf;
    B(P, 0) += k * wf * se * se;
    B(P, 1) += k * wf * se * sa;
    A(Z, Y) = wf * yo;
    A(Z, Z) = -wf;
    B(Z, 0) = -wf * se * se;
    B(Z, 1) = -wf * se * sa;
    sde.fastest_rate = std::max(sde.fastest_rate, wf);
  } else {
    sde.labels = {"Q", "P", "Y", "X"};
    if (g > 0.0) {
      const double gmf = -g * gamma / (4.0 * gb);
      A(Q, Y) = gmf * gc;
      const double c = -0.5 * gmf * std::sqrt(gc / eta);
      B(Q, 0) = c * se;
      B(Q, 1) = c * sa;
    }
  }
  require_hurwitz(sde);
  return sde;
}

Matrix stationary_covariance_lyapunov(const LinearSDE& sde) {
  if (!(spectral_abscissa(sde.drift) < 0.0)) throw SolverError("drift matrix is not Hurwitz");
  return solve_lyapunov(sde.drift, sde.noise * sde.noise.transpose());
}

namespace {

struct TrajectoryResult {
  double q2 = 0.0, p2 = 0.0, qp = 0.0;
  std::vector<double> corr_qq;  // sum over origins of Q(t+l) Q(t)
  std::vector<double> corr_pq;
  std::vector<long> corr_count;
};

void dump_row(std::ofstream& out, double t, const Vector& x, int dim) {
  out << t << ',' << x[0] << ',' << x[1];
  if (dim >= 4) out << ',' << x[2] << ',' << x[3];
  out << '\n';
}

}  // namespace

EnsembleStats simulate_ensemble(const LinearSDE& sde, const EnsembleOptions& opts) {
  if (opts.n_traj < 2) throw DomainError("n_traj", "need at least two trajectories");
  if (!(opts.dt > 0.0)) throw DomainError("dt", "must be positive");
  if (opts.dt > 0.05 / sde.fastest_rate * (1.0 + 1e-12))
    throw DomainError("dt", "exceeds 0.05 / fastest rate of the system");
  if (opts.n_steps < 1) throw DomainError("n_steps", "must be positive");
  if (opts.substeps < 1) throw DomainError("substeps", "must be positive");
  const int noise_substeps = opts.noise_substeps > 0 ? opts.noise_substeps : opts.substeps;
  if (noise_substeps % opts.substeps != 0)
    throw DomainError("noise_substeps", "must be a multiple of substeps");

  const double cov_rate = 2.0 * sde.slowest_rate;
  const long burn_in = opts.burn_in_steps.value_or(
      static_cast<long>(std::ceil(10.0 / (cov_rate * opts.dt))));
  const double h = opts.dt / opts.substeps;
  const int dim = sde.dim;
  const bool exact = opts.integrator == Integrator::exact;

  // Each internal step of size h consumes `per_step` unit normal vectors drawn
  // on the finer noise grid, so runs that differ only in `substeps` share a path.
  const int per_step = noise_substeps / opts.substeps;
  const double hf = h / per_step;
  const Discretization disc = discretize(sde.drift, sde.noise, h);
  std::vector<Matrix> noise_maps;  // exact: F_hf^{per_step-1-j} L_hf
  if (exact) {
    const Discretization fine = discretize(sde.drift, sde.noise, hf);
    Matrix power = Matrix::Identity(dim, dim);
    noise_maps.assign(per_step, Matrix());
    for (int j = per_step - 1; j >= 0; --j) {
      noise_maps[j] = power * fine.noise_factor;
      power = fine.transition * power;
    }
  }
  const Matrix em_noise = sde.noise * std::sqrt(hf);
  const Matrix em_step = Matrix::Identity(dim, dim) + sde.drift * h;

  // autocorrelation sampling: ~10 samples per covariance relaxation time, 20 lags
  const long ac_stride = std::max(1L, std::lround(0.1 / (cov_rate * opts.dt)));
  constexpr int n_lags = 21;

  std::vector<TrajectoryResult> results(opts.n_traj);
  auto run = [&](int i) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x = Vector::Zero(dim);
    Vector z(exact ? dim : sde.noise.cols());
    Vector w(exact ? dim : sde.noise.cols());

    std::ofstream dump;
    if (i < opts.dump_count && !opts.dump_dir.empty()) {
      std::filesystem::create_directories(opts.dump_dir);
      dump.open(std::filesystem::path(opts.dump_dir) / ("traj_" + std::to_string(i) + ".csv"));
      dump << std::setprecision(17) << (dim >= 4 ? "t,Q,P,Y,X\n" : "t,Q,P\n");
    }

    double sq = 0.0, sp = 0.0, sqp = 0.0;
    auto step = [&](bool record) {
      for (int s = 0; s < opts.substeps; ++s) {
        w.setZero();
        for (int j = 0; j < per_step; ++j) {
          for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
          if (exact) w.noalias() += noise_maps[j] * z;
          else w += z;
        }
        if (exact) x = disc.transition * x + w;
        else x = em_step * x + em_noise * w;
        if (record) {
          sq += x[0] * x[0];
          sp += x[1] * x[1];
          sqp += x[0] * x[1];
        }
      }
    };

    for (long n = 0; n < burn_in; ++n) step(false);

    TrajectoryResult& r = results[i];
    r.corr_qq.assign(n_lags, 0.0);
    r.corr_pq.assign(n_lags, 0.0);
    r.corr_count.assign(n_lags, 0);
    std::vector<double> hist_q(n_lags, 0.0);
    long recorded = 0;
    for (long n = 0; n < opts.n_steps; ++n) {
      step(true);
      if (dump.is_open() && n % opts.dump_stride == 0) dump_row(dump, (burn_in + n + 1) * opts.dt, x, dim);
      if (n % ac_stride == 0) {
        // ring buffer of past Q samples
        hist_q[recorded % n_lags] = x[0];
        const long avail = std::min<long>(recorded + 1, n_lags);
        for (long l = 0; l < avail; ++l) {
          const double q0 = hist_q[(recorded - l) % n_lags];
          r.corr_qq[l] += x[0] * q0;
          r.corr_pq[l] += x[1] * q0;
          ++r.corr_count[l];
        }
        ++recorded;
      }
    }
    const double inv = 1.0 / (static_cast<double>(opts.n_steps) * opts.substeps);
    r.q2 = sq * inv;
    r.p2 = sp * inv;
    r.qp = sqp * inv;
  };

  const int hw = opts.threads > 0 ? opts.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::min(hw, opts.n_traj);
  std::atomic<int> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < opts.n_traj; i = next++) run(i);
      });
  }

  EnsembleStats stats;
  stats.n_traj = opts.n_traj;
  stats.burn_in_steps = burn_in;
  auto summarize = [&](auto member) {
    double mean = 0.0;
    for (const auto& r : results) mean += r.*member;
    mean /= opts.n_traj;
    double var = 0.0;
    for (const auto& r : results) var += (r.*member - mean) * (r.*member - mean);
    var /= (opts.n_traj - 1);
    return Estimate{mean, std::sqrt(var / opts.n_traj)};
  };
  stats.q2 = summarize(&TrajectoryResult::q2);
  stats.p2 = summarize(&TrajectoryResult::p2);
  stats.qp = summarize(&TrajectoryResult::qp);

  // Fit ln(C_QQ^2 + C_PQ^2) against lag time.
  std::vector<double> lag_t, log_env;
  for (int l = 0; l < n_lags; ++l) {
    double cqq = 0.0, cpq = 0.0;
    long cnt = 0;
    for (const auto& r : results) {
      cqq += r.corr_qq[l];
      cpq += r.corr_pq[l];
      cnt += r.corr_count[l];
    }
    if (cnt == 0) continue;
    cqq /= cnt;
    cpq /= cnt;
    const double env = cqq * cqq + cpq * cpq;
    if (env <= 0.0) continue;
    lag_t.push_back(l * ac_stride * opts.dt);
    log_env.push_back(std::log(env));
  }
  if (lag_t.size() >= 3) {
    const double n = static_cast<double>(lag_t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lag_t.size(); ++k) {
      sx += lag_t[k];
      sy += log_env[k];
      sxx += lag_t[k] * lag_t[k];
      sxy += lag_t[k] * log_env[k];
    }
    stats.decay_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (stats.decay_rate > 0.0) stats.autocorrelation_time = 1.0 / stats.decay_rate;
  }
  return stats;
}

std::vector<AdiabaticDeviation> adiabatic_validity_check(const SystemParams& sys,
                                                         const FeedbackScheme& scheme,
                                                         const std::vector<double>& ladder) {
  if (ladder.empty()) throw DomainError("gamma_c", "empty ladder");
  const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
  if (!(*lo > 1.0)) throw DomainError("gamma_c", "ladder must lie above omega_m");
  if (*hi / *lo < 100.0 * (1.0 - 1e-12))
    throw DomainError("gamma_c", "ladder must span at least two decades");

  const auto ad = build_sde(sys, scheme, SdeForm::adiabatic);
  const Matrix s_ad = stationary_covariance_lyapunov(ad);
  std::vector<AdiabaticDeviation> out;
  for (double gc : ladder) {
    SystemParams s = sys;
    s.cav.gamma_c = gc * sys.mech.omega_m;
    const auto full = build_sde(s, scheme, SdeForm::full);
    const Matrix s_full = stationary_covariance_lyapunov(full);
    AdiabaticDeviation d;
    d.gamma_c = gc;
    d.q2 = std::abs(s_full(0, 0) - s_ad(0, 0)) / std::abs(s_ad(0, 0));
    d.p2 = std::abs(s_full(1, 1) - s_ad(1, 1)) / std::abs(s_ad(1, 1));
    d.qp = std::abs(s_full(0, 1) - s_ad(0, 1)) / std::sqrt(s_ad(0, 0) * s_ad(1, 1));
    const double zeta = scheme.kind == SchemeKind::RingRelative && scheme.ring_zeta
                            ? *scheme.ring_zeta
                            : sys.zeta;
    const double gb = std::sqrt(zeta * gc / sys.quality()) / 4.0;
    d.inside_regime = gc >= 100.0 * std::max(1.0, gb);
    out.push_back(d);
  }
  return out;
}

}  // namespace optofb
