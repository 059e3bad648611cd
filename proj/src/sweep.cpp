#include "optofb/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "optofb/langevin.hpp"
#include "optofb/spectral.hpp"
#include "optofb/steady.hpp"

namespace optofb {

RunConfig resolve(const RunConfig& cfg) {
  RunConfig c = cfg;
  if (c.scheme == SchemeKind::RingRelative && !c.ring_zeta && c.gain > 0.0)
    c.ring_zeta = squeezing_optimal_zeta(c.gain, c.quality, c.eta);
  return c;
}

EnsembleOptions ensemble_options(const RunConfig& cfg, const LinearSDE& sde) {
  EnsembleOptions o;
  o.dt = cfg.dt > 0.0 ? cfg.dt : 0.05 / sde.fastest_rate;
  // 50 covariance relaxation times of recorded data per trajectory
  o.n_steps = cfg.n_steps > 0 ? cfg.n_steps
                              : static_cast<long>(std::ceil(50.0 / (2.0 * sde.slowest_rate * o.dt)));
  o.n_traj = cfg.n_traj;
  o.seed = cfg.seed;
  o.burn_in_steps = cfg.burn_in_steps;
  o.substeps = cfg.substeps;
  o.noise_substeps = cfg.noise_substeps;
  o.integrator = cfg.integrator;
  o.threads = cfg.threads;
  o.dump_count = cfg.dump_count;
  o.dump_dir = cfg.dump_dir;
  return o;
}

MomentSet evaluate(const RunConfig& raw, Method method) {
  const RunConfig cfg = resolve(raw);
  const SystemParams sys = make_system(cfg);
  const FeedbackScheme scheme = make_scheme(cfg);
  MomentSet m;
  m.method = method;
  switch (method) {
    case Method::analytic: {
      const auto s = steady_state(sys, scheme, cfg.log_correction);
      m.q2 = s.q2;
      m.p2 = s.p2;
      m.qp = s.qp_sym;
      m.occupancy = s.occupancy;
      m.warnings = s.warnings;
      break;
    }
    case Method::spectral: {
      SpectralOptions opts;
      opts.quad.rel_tol = cfg.quad_rel_tol;
      const auto q = variance_integral(scheme, Moment::q2, NoiseSource::all, sys, opts);
      const auto p = variance_integral(scheme, Moment::p2, NoiseSource::all, sys, opts);
      const auto c = variance_integral(scheme, Moment::qp, NoiseSource::all, sys, opts);
      m.q2 = q.value;
      m.p2 = p.value;
      m.qp = c.value;
      m.q2_err = q.abs_error_estimate;
      m.p2_err = p.abs_error_estimate;
      m.qp_err = c.abs_error_estimate;
      m.converged = q.converged && p.converged && c.converged;
      break;
    }
    case Method::lyapunov: {
      const auto sde = build_sde(sys, scheme, cfg.form);
      const Matrix s = stationary_covariance_lyapunov(sde);
      m.q2 = s(0, 0);
      m.p2 = s(1, 1);
      m.qp = s(0, 1);
      m.warnings = sde.warnings;
      break;
    }
    case Method::ensemble: {
      const auto sde = build_sde(sys, scheme, cfg.form);
      const auto stats = simulate_ensemble(sde, ensemble_options(cfg, sde));
      m.q2 = stats.q2.mean;
      m.p2 = stats.p2.mean;
      m.qp = stats.qp.mean;
      m.q2_err = stats.q2.stderr_;
      m.p2_err = stats.p2.stderr_;
      m.qp_err = stats.qp.stderr_;
      m.warnings = sde.warnings;
      break;
    }
  }
  return m;
}

SweepRow make_row(const RunConfig& raw, const MomentSet& m, const std::string& series, double x) {
  const RunConfig cfg = resolve(raw);
  SweepRow r;
  r.series = series;
  r.x = x;
  r.q2 = m.q2;
  r.p2 = m.p2;
  r.qp_sym = m.qp;
  r.energy_units = 2.0 * (m.q2 + m.p2);
  r.occupancy = m.occupancy;
  r.contractive = m.qp < 0.0;
  r.squeezed = m.q2 < 0.25;
  r.method = to_string(m.method);
  if (cfg.scheme == SchemeKind::RingRelative) {
    const double p_plus2 = 0.5 * cfg.theta + log_correction_term(cfg.quality, cfg.cutoff_ratio);
    const double marker = 16.0 * m.q2 * p_plus2;
    r.entanglement_marker = marker;
    r.entangled = marker < 1.0;
  }
  return r;
}

std::string series_label(const std::string& variable, double value) {
  std::ostringstream os;
  os << variable << '=' << value;
  return os.str();
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  validate(cfg);
  if (!cfg.sweep) throw DomainError("sweep_variable", "no sweep specified");
  const auto xs = sweep_values(*cfg.sweep);

  struct Task {
    RunConfig cfg;
    std::string series;
    double x;
    Method method;
  };
  std::vector<Task> tasks;
  const std::vector<std::optional<double>> series =
      cfg.series.empty() ? std::vector<std::optional<double>>{std::nullopt}
                         : std::vector<std::optional<double>>(cfg.series.begin(), cfg.series.end());
  for (const auto& sv : series) {
    RunConfig base = cfg;
    std::string label = "all";
    if (sv) {
      set_variable(base, cfg.series_variable, *sv);
      label = series_label(cfg.series_variable, *sv);
    }
    for (double x : xs) {
      RunConfig point = base;
      set_variable(point, cfg.sweep->variable, x);
      validate(point);
      for (Method m : cfg.methods) tasks.push_back({point, label, x, m});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto& t = tasks[i];
        rows[i] = make_row(t.cfg, evaluate(t.cfg, t.method), t.series, t.x);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  // the ensemble method parallelizes over trajectories itself
  bool has_ensemble = false;
  for (Method m : cfg.methods) has_ensemble |= m == Method::ensemble;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers =
      has_ensemble ? 1u : static_cast<unsigned>(std::min<std::size_t>(hw, tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace optofb
