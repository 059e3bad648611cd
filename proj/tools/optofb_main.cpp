// optofb: steady states, sweeps, figures, simulations and optima of
// feedback-cooled optomechanical oscillators.
//
// Exit codes: 0 success, 1 validation error, 2 numerical non-convergence,
// 3 consistency-check failure.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "optofb/config.hpp"
#include "optofb/csv.hpp"
#include "optofb/figures.hpp"
#include "optofb/langevin.hpp"
#include "optofb/steady.hpp"
#include "optofb/sweep.hpp"

using namespace optofb;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNonConvergence = 2;
constexpr int kConsistency = 3;

struct Common {
  std::string config_path;
  bool verify = false;
  bool log_correction = false;
  bool plot = false;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value configuration file");
  cmd->add_flag("--log-correction", c.log_correction, "include the cutoff-dependent momentum term");
  for (const auto& key : config_keys())
    cmd->add_option_function<std::string>(
        "--" + key, [&c, key](const std::string& v) { c.overrides[key] = v; }, "override '" + key + "'");
}

RunConfig load(const Common& c, RunConfig base = {}) {
  RunConfig cfg = c.config_path.empty() ? base : load_config(c.config_path);
  for (const auto& [k, v] : c.overrides) apply_setting(cfg, k, v);
  if (c.log_correction) cfg.log_correction = true;
  validate(cfg);
  return cfg;
}

double rel_dev(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

void write_rows(const std::string& out, const std::vector<SweepRow>& rows) {
  if (out.empty() || out == "-") write_csv(std::cout, rows);
  else write_csv_file(out, rows);
}

int cmd_steady(const Common& c) {
  const RunConfig cfg = resolve(load(c));
  const auto sys = make_system(cfg);
  const auto scheme = make_scheme(cfg);
  const auto s = steady_state(sys, scheme, cfg.log_correction);
  print_warnings(s.warnings);
  std::cout << std::setprecision(12);
  std::cout << "scheme        " << to_string(cfg.scheme) << "  gain " << cfg.gain << "  zeta "
            << (cfg.scheme == SchemeKind::RingRelative && cfg.ring_zeta ? *cfg.ring_zeta : cfg.zeta) << '\n'
            << "q2            " << s.q2 << "  (back-action " << s.q2_parts.back_action << ", feedback "
            << s.q2_parts.feedback_induced << ", brownian " << s.q2_parts.brownian << ")\n"
            << "p2            " << s.p2 << "  (back-action " << s.p2_parts.back_action << ", feedback "
            << s.p2_parts.feedback_induced << ", brownian " << s.p2_parts.brownian << ")\n"
            << "qp_sym        " << s.qp_sym << '\n'
            << "energy_units  " << s.energy_units << '\n';
  if (s.occupancy) std::cout << "occupancy     " << *s.occupancy << '\n';
  if (cfg.log_correction) std::cout << "log_term      " << s.log_term << '\n';
  if (s.below_uncertainty_bound) std::cout << "note          state below the uncertainty bound\n";

  std::vector<SweepRow> rows;
  MomentSet analytic = evaluate(cfg, Method::analytic);
  rows.push_back(make_row(cfg, analytic, "all", 0.0));
  int code = kOk;
  if (c.verify) {
    std::cout << "method      q2                   p2                   qp_sym               max rel dev\n";
    for (Method m : {Method::spectral, Method::lyapunov}) {
      RunConfig vc = cfg;
      vc.form = SdeForm::adiabatic;
      const auto r = evaluate(vc, m);
      print_warnings(r.warnings);
      double dev = std::max(rel_dev(r.q2, s.q2), rel_dev(r.p2, s.p2));
      // tiny correlations are compared absolutely
      const double qp_dev = std::abs(s.qp_sym) < 1e-6 ? std::abs(r.qp - s.qp_sym) / 1e-6 * 1e-3
                                                       : rel_dev(r.qp, s.qp_sym);
      dev = std::max(dev, qp_dev);
      std::cout << std::left << std::setw(12) << to_string(m) << std::setw(21) << r.q2 << std::setw(21)
                << r.p2 << std::setw(21) << r.qp << dev << (dev > cfg.tol_rel ? "  FAIL" : "") << '\n';
      if (!r.converged) code = std::max(code, kNonConvergence);
      if (dev > cfg.tol_rel) code = kConsistency;
      rows.push_back(make_row(cfg, r, "all", 0.0));
    }
  }
  if (!cfg.out.empty()) write_csv_file(cfg.out, rows);
  return code;
}

int cmd_sweep(const Common& c) {
  RunConfig cfg = load(c);
  if (!cfg.sweep) throw DomainError("sweep_variable", "a sweep needs sweep_variable, sweep_min, sweep_max");
  const auto rows = run_sweep(cfg);
  write_rows(cfg.out, rows);
  if (c.plot && !cfg.out.empty() && cfg.out != "-") {
    const std::filesystem::path csv(cfg.out);
    std::filesystem::path gp = csv;
    gp.replace_extension(".gp");
    std::ofstream f(gp);
    f << "set datafile separator ','\nset logscale x\nset xlabel '" << cfg.sweep->variable
      << "'\nset ylabel '2U/hbar omega_m'\nplot '" << csv.filename().string()
      << "' every ::1 using 2:6 with points title 'energy_units'\n";
  }
  return kOk;
}

int cmd_figure(const Common& c, const std::string& name) {
  const RunConfig cfg = load(c, figure_defaults(name));
  if (!cfg.sweep) throw DomainError("sweep_variable", "figure configuration lost its sweep");
  const std::string dir = cfg.out.empty() ? "." : cfg.out;
  const auto fo = run_figure(name, cfg, dir);
  std::cout << name << ": " << fo.rows.size() << " rows -> " << fo.csv_path << ", " << fo.plot_path << '\n';
  for (const auto& ch : fo.checks)
    std::cout << (ch.passed ? "  PASS  " : "  FAIL  ") << ch.description
              << (ch.detail.empty() ? "" : "  [" + ch.detail + "]") << '\n';
  return fo.passed() ? kOk : kConsistency;
}

int cmd_simulate(const Common& c) {
  const RunConfig cfg = resolve(load(c));
  const auto sys = make_system(cfg);
  const auto scheme = make_scheme(cfg);
  const auto sde = build_sde(sys, scheme, cfg.form);
  print_warnings(sde.warnings);
  const Matrix lyap = stationary_covariance_lyapunov(sde);
  const auto analytic = steady_state(sys, scheme);
  const auto opts = ensemble_options(cfg, sde);
  const auto st = simulate_ensemble(sde, opts);

  std::cout << std::setprecision(10) << "form " << (cfg.form == SdeForm::full ? "full" : "adiabatic")
            << "  dim " << sde.dim << "  dt " << opts.dt << "  steps " << opts.n_steps << "  burn-in "
            << st.burn_in_steps << "  trajectories " << st.n_traj << "  seed " << cfg.seed << '\n';
  std::cout << "moment  ensemble             stderr           lyapunov             analytic             z\n";
  int code = kOk;
  auto line = [&](const char* name, const Estimate& e, double ly, double an) {
    const double z = e.stderr_ > 0.0 ? (e.mean - ly) / e.stderr_ : 0.0;
    std::cout << std::left << std::setw(8) << name << std::setw(21) << e.mean << std::setw(17) << e.stderr_
              << std::setw(21) << ly << std::setw(21) << an << z
              << (std::abs(z) > cfg.tol_sigma ? "  FAIL" : "") << '\n';
    if (std::abs(z) > cfg.tol_sigma) code = kConsistency;
  };
  line("q2", st.q2, lyap(0, 0), analytic.q2);
  line("p2", st.p2, lyap(1, 1), analytic.p2);
  line("qp", st.qp, lyap(0, 1), analytic.qp_sym);
  std::cout << "decay rate " << st.decay_rate << "  (damping " << sde.damping << ")\n";

  if (!cfg.out.empty()) {
    MomentSet m;
    m.method = Method::ensemble;
    m.q2 = st.q2.mean;
    m.p2 = st.p2.mean;
    m.qp = st.qp.mean;
    write_csv_file(cfg.out, {make_row(cfg, m, "all", 0.0)});
  }
  return code;
}

int cmd_optimize(const Common& c) {
  const RunConfig cfg = load(c);
  std::vector<double> gains{cfg.gain};
  if (!cfg.series.empty() && cfg.series_variable == "gain") gains = cfg.series;
  int code = kOk;
  std::cout << std::setprecision(12);
  std::cout << "gain                zeta_opt            reference           rel diff            energy_units\n";
  for (double g : gains) {
    if (cfg.scheme == SchemeKind::ColdDamping) {
      const auto o = cold_damping_optimum(g, cfg.eta, cfg.theta);
      if (!o.interior) {
        std::cout << g << "  boundary: zeta_opt = 0 (no interior minimum without feedback)\n";
        continue;
      }
      const double d = rel_dev(o.zeta_opt, o.zeta_analytic);
      std::cout << std::left << std::setw(20) << g << std::setw(20) << o.zeta_opt << std::setw(20)
                << o.zeta_analytic << std::setw(20) << d << o.energy_units
                << (d > 1e-6 ? "  FAIL" : "") << '\n';
      if (d > 1e-6) code = kConsistency;
    } else {
      const auto o = momentum_feedback_optimum(g, cfg.eta, cfg.theta, cfg.quality);
      if (!o.interior) {
        std::cout << g << "  boundary: zeta_opt = 0 (no interior minimum without feedback)\n";
        continue;
      }
      const double exact = momentum_feedback_exact_zeta_opt(g, cfg.eta, cfg.quality);
      const double d = rel_dev(o.zeta_opt, exact);
      std::cout << std::left << std::setw(20) << g << std::setw(20) << o.zeta_opt << std::setw(20) << exact
                << std::setw(20) << d << o.energy_units << (d > 1e-6 ? "  FAIL" : "")
                << "  (g/sqrt(eta) = " << g / std::sqrt(cfg.eta) << ")\n";
      if (d > 1e-6) code = kConsistency;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states and simulations of feedback-cooled optomechanical oscillators"};
  app.require_subcommand(1);

  Common steady, sweep, figure, simulate, optimize;
  auto* s = app.add_subcommand("steady", "closed-form steady state (--verify adds spectral and Lyapunov)");
  add_common(s, steady);
  s->add_flag("--verify", steady.verify, "cross-check against the spectral and Lyapunov routes");

  auto* w = app.add_subcommand("sweep", "sweep one variable and write CSV rows");
  add_common(w, sweep);
  w->add_flag("--plot", sweep.plot, "write a gnuplot script next to the CSV");

  std::string fig_name;
  auto* f = app.add_subcommand("figure", "reproduce a standard figure (CSV + gnuplot script)");
  add_common(f, figure);
  f->add_option("name", fig_name, "fig3 | fig4 | fig5 | fig6_qp | fig6_squeeze | fig7")->required();

  auto* m = app.add_subcommand("simulate", "Langevin ensemble vs Lyapunov and closed form");
  add_common(m, simulate);

  auto* o = app.add_subcommand("optimize", "optimal input power at fixed gain");
  add_common(o, optimize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*s) return cmd_steady(steady);
    if (*w) return cmd_sweep(sweep);
    if (*f) return cmd_figure(figure, fig_name);
    if (*m) return cmd_simulate(simulate);
    if (*o) return cmd_optimize(optimize);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
