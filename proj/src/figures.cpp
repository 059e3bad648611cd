#include "optofb/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "optofb/steady.hpp"
#include "optofb/sweep.hpp"

namespace optofb {

namespace {

struct Layout {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::string ycolumn;  // gnuplot expression over CSV columns
  bool ylog = true;
  std::optional<double> reference;  // horizontal guide line
  std::string reference_label;
};

Layout layout(const std::string& name) {
  if (name == "fig3")
    return {"Cold damping: rescaled steady-state energy 2U/hbar omega_m vs input power",
            "zeta", "2U/hbar omega_m", "$6", true, 1.0, "ground state"};
  if (name == "fig4")
    return {"Momentum feedback: rescaled steady-state energy vs input power (Q = 1e7)",
            "zeta", "2U/hbar omega_m", "$6", true, 1.0, "ground state"};
  if (name == "fig5")
    return {"Momentum feedback: rescaled steady-state energy vs input power (g1 = 1e7)",
            "zeta", "2U/hbar omega_m", "$6", true, 1.0, "ground state"};
  if (name == "fig6_qp")
    return {"Steady-state position-momentum correlation <QP + PQ>", "zeta", "<QP + PQ>",
            "(2*$5)", false, 0.0, "contractive below"};
  if (name == "fig6_squeeze")
    return {"Steady-state position variance <Q^2>", "zeta", "<Q^2>", "$3", true, 0.25,
            "standard quantum limit"};
  if (name == "fig7")
    return {"Marker of entanglement E = 16 <Q_-^2><P_+^2> at optimal ring power", "g3", "E",
            "$11", true, 1.0, "entanglement threshold"};
  throw DomainError("figure", "unknown figure '" + name + "'");
}

struct Curve {
  std::string label;
  double value = 0.0;  // series value
  std::vector<double> x, y;
};

double y_of(const std::string& name, const SweepRow& r) {
  if (name == "fig6_qp") return 2.0 * r.qp_sym;
  if (name == "fig6_squeeze") return r.q2;
  if (name == "fig7") return r.entanglement_marker.value_or(std::nan(""));
  return r.energy_units;
}

std::vector<Curve> curves(const std::string& name, const RunConfig& cfg,
                          const std::vector<SweepRow>& rows) {
  std::vector<Curve> out;
  const std::string method = to_string(cfg.methods.front());
  const std::vector<double> values = cfg.series.empty() ? std::vector<double>{0.0} : cfg.series;
  for (double v : values) {
    Curve c;
    c.value = v;
    c.label = cfg.series.empty() ? "all" : series_label(cfg.series_variable, v);
    for (const auto& r : rows)
      if (r.series == c.label && r.method == method) {
        c.x.push_back(r.x);
        c.y.push_back(y_of(name, r));
      }
    out.push_back(std::move(c));
  }
  return out;
}

std::size_t argmin(const std::vector<double>& y) {
  return static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// log10 spacing of the sweep grid
double grid_step(const RunConfig& cfg) {
  const auto& s = *cfg.sweep;
  return s.points > 1 ? (std::log10(s.max) - std::log10(s.min)) / (s.points - 1) : 1.0;
}

void check_interior_minima(const std::vector<Curve>& cs, std::vector<FigureCheck>& out) {
  FigureCheck c{"every curve has an interior minimum", true, ""};
  for (const auto& cv : cs) {
    const auto i = argmin(cv.y);
    if (cv.y.size() < 3 || i == 0 || i + 1 == cv.y.size()) {
      c.passed = false;
      c.detail += cv.label + " has its minimum at the sweep edge; ";
    }
  }
  out.push_back(c);
}

void check_minima_decreasing(const std::vector<Curve>& cs, const std::string& what,
                             std::vector<FigureCheck>& out) {
  FigureCheck c{"minimum decreases with increasing " + what, true, ""};
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const double m = *std::min_element(cs[k].y.begin(), cs[k].y.end());
    c.detail += cs[k].label + ": " + fmt(m) + "; ";
    if (k > 0) {
      const double prev = *std::min_element(cs[k - 1].y.begin(), cs[k - 1].y.end());
      if (!(m < prev)) c.passed = false;
    }
  }
  out.push_back(c);
}

// First sign change of y, located by log-linear interpolation.
std::optional<double> first_crossing(const Curve& cv, double level, bool log_y) {
  for (std::size_t i = 0; i + 1 < cv.y.size(); ++i) {
    const double a = cv.y[i] - level, b = cv.y[i + 1] - level;
    if ((a < 0.0) != (b < 0.0)) {
      double ya = cv.y[i], yb = cv.y[i + 1], lv = level;
      if (log_y) {
        ya = std::log(ya);
        yb = std::log(yb);
        lv = std::log(level);
      }
      const double t = (lv - ya) / (yb - ya);
      const double lx = std::log(cv.x[i]) + t * (std::log(cv.x[i + 1]) - std::log(cv.x[i]));
      return std::exp(lx);
    }
  }
  return std::nullopt;
}

}  // namespace

bool FigureOutput::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const FigureCheck& c) { return c.passed; });
}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig3",    "fig4",         "fig5",
                                                 "fig6_qp", "fig6_squeeze", "fig7"};
  return names;
}

RunConfig figure_defaults(const std::string& name) {
  RunConfig c;
  c.theta = 1e5;
  c.eta = 0.8;
  c.cutoff_ratio = 100.0;
  SweepSpec s;
  s.variable = "zeta";
  s.log_scale = true;
  s.min = 0.1;
  s.max = 1e10;
  s.points = 221;
  if (name == "fig3") {
    c.scheme = SchemeKind::ColdDamping;
    c.quality = 1e4;
    c.series_variable = "gain";
    c.series = {10, 1e3, 1e5, 1e7};
  } else if (name == "fig4") {
    c.scheme = SchemeKind::MomentumFeedback;
    c.quality = 1e7;
    c.series_variable = "gain";
    c.series = {10, 1e3, 1e5, 1e7};
  } else if (name == "fig5") {
    c.scheme = SchemeKind::MomentumFeedback;
    c.gain = 1e7;
    c.series_variable = "quality";
    c.series = {1e3, 1e5, 1e7};
  } else if (name == "fig6_qp") {
    c.scheme = SchemeKind::MomentumFeedback;
    c.quality = 1e4;
    c.series_variable = "gain";
    c.series = {1e5, 1e6, 1e7};
    s.min = 1e-3;
    s.max = 1e3;
    s.points = 241;
  } else if (name == "fig6_squeeze") {
    c.scheme = SchemeKind::MomentumFeedback;
    c.quality = 1e4;
    c.series_variable = "gain";
    c.series = {1e7, 1e9};
    s.min = 1e5;
    s.max = 1e12;
    s.points = 281;
  } else if (name == "fig7") {
    c.scheme = SchemeKind::RingRelative;
    c.series_variable = "quality";
    c.series = {1e3, 3e3, 1e4};
    s.variable = "gain";
    s.min = 1e10;
    s.max = 1e22;
    s.points = 241;
  } else {
    throw DomainError("figure", "unknown figure '" + name + "'");
  }
  c.sweep = s;
  return c;
}

std::string plot_script(const std::string& name, const RunConfig& cfg, const std::string& csv_file) {
  const Layout l = layout(name);
  std::ostringstream gp;
  gp << "# gnuplot script; run: gnuplot " << name << ".gp\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,650\n"
     << "set output '" << name << ".png'\n"
     << "set title \"" << l.title << " (theta = " << fmt(cfg.theta) << ", eta = " << fmt(cfg.eta)
     << ")\"\n"
     << "set xlabel \"" << l.xlabel << "\"\n"
     << "set ylabel \"" << l.ylabel << "\"\n"
     << "set logscale x\n"
     << "set format x '10^{%L}'\n";
  if (l.ylog) gp << "set logscale y\nset format y '10^{%L}'\n";
  gp << "set key top right\nset grid\n";
  const std::string method = to_string(cfg.methods.front());
  const std::vector<double> values = cfg.series.empty() ? std::vector<double>{0.0} : cfg.series;
  gp << "plot ";
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::string label = cfg.series.empty() ? "all" : series_label(cfg.series_variable, values[k]);
    gp << (k ? ", \\\n     " : "") << "'" << csv_file << "' every ::1 using "
       << "(strcol(1) eq '" << label << "' && strcol(12) eq '" << method << "' ? $2 : 1/0):"
       << l.ycolumn << " with lines lw 2 title '" << label << "'";
  }
  if (l.reference) gp << ", \\\n     " << fmt(*l.reference) << " with lines dt 2 lc rgb 'black' title '"
                      << l.reference_label << "'";
  gp << "\n";
  return gp.str();
}

std::vector<FigureCheck> check_figure(const std::string& name, const RunConfig& cfg,
                                      const std::vector<SweepRow>& rows) {
  std::vector<FigureCheck> out;
  const auto cs = curves(name, cfg, rows);
  {
    FigureCheck c{"every curve has data", true, ""};
    for (const auto& cv : cs)
      if (cv.y.empty()) {
        c.passed = false;
        c.detail += cv.label + " is empty; ";
      }
    out.push_back(c);
    if (!c.passed) return out;
  }

  if (name == "fig3" || name == "fig4") {
    check_interior_minima(cs, out);
    check_minima_decreasing(cs, cfg.series_variable, out);
  }
  if (name == "fig3") {
    FigureCheck pos{"minimum lies at zeta = g / sqrt(eta) within one grid step", true, ""};
    FigureCheck lvl{"minimum energy matches (g/(1+g)) (1/sqrt(eta) + 2 theta/g) within 1%", true, ""};
    for (const auto& cv : cs) {
      const double g = cv.value;
      const auto i = argmin(cv.y);
      const double dx = std::abs(std::log10(cv.x[i]) - std::log10(g / std::sqrt(cfg.eta)));
      if (dx > grid_step(cfg)) pos.passed = false;
      pos.detail += cv.label + ": " + fmt(cv.x[i]) + "; ";
      const double e = g / (1.0 + g) * (1.0 / std::sqrt(cfg.eta) + 2.0 * cfg.theta / g);
      if (std::abs(cv.y[i] - e) > 0.01 * e) lvl.passed = false;
      lvl.detail += cv.label + ": " + fmt(cv.y[i]) + " vs " + fmt(e) + "; ";
    }
    out.push_back(pos);
    out.push_back(lvl);
  }
  if (name == "fig5") {
    check_minima_decreasing(cs, cfg.series_variable, out);
    FigureCheck c{"only the largest quality factor cools to within 0.5 quanta of the ground state "
                  "(minimum energy below 2)",
                  true, ""};
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const double m = *std::min_element(cs[k].y.begin(), cs[k].y.end());
      const bool near = m < 2.0;
      if (near != (k + 1 == cs.size())) c.passed = false;
      c.detail += cs[k].label + ": " + fmt(m) + "; ";
    }
    out.push_back(c);
  }
  if (name == "fig6_qp") {
    FigureCheck sign{"each curve is contractive at low power and changes sign once", true, ""};
    FigureCheck thr{"sign change at g = eta zeta (zeta + 4 theta) within one grid step", true, ""};
    FigureCheck ord{"sign change moves to higher power with increasing gain", true, ""};
    std::optional<double> prev;
    for (const auto& cv : cs) {
      int changes = 0;
      for (std::size_t i = 0; i + 1 < cv.y.size(); ++i) changes += (cv.y[i] < 0.0) != (cv.y[i + 1] < 0.0);
      if (!(cv.y.front() < 0.0) || changes != 1) sign.passed = false;
      const auto cross = first_crossing(cv, 0.0, false);
      // root of eta z^2 + 4 eta theta z - g = 0
      const double g = cv.value;
      const double z = (-4.0 * cfg.eta * cfg.theta +
                        std::sqrt(16.0 * cfg.eta * cfg.eta * cfg.theta * cfg.theta + 4.0 * cfg.eta * g)) /
                       (2.0 * cfg.eta);
      if (!cross || std::abs(std::log10(*cross) - std::log10(z)) > grid_step(cfg)) thr.passed = false;
      thr.detail += cv.label + ": " + (cross ? fmt(*cross) : std::string("none")) + " vs " + fmt(z) + "; ";
      if (cross && prev && !(*cross > *prev)) ord.passed = false;
      if (cross) prev = cross;
    }
    out.push_back(sign);
    out.push_back(thr);
    out.push_back(ord);
  }
  if (name == "fig6_squeeze") {
    FigureCheck dip{"largest gain dips below 1/4, smallest gain does not", true, ""};
    FigureCheck exact{"grid minimum agrees with the closed-form minimum within 1%", true, ""};
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto i = argmin(cs[k].y);
      const double m = cs[k].y[i];
      if (k == 0 && !(m > 0.25)) dip.passed = false;
      if (k + 1 == cs.size() && !(m < 0.25)) dip.passed = false;
      dip.detail += cs[k].label + ": " + fmt(m) + "; ";
      const auto sm = squeezing_minimum(cs[k].value, cfg.quality, cfg.eta, cfg.theta);
      if (m < sm.q2_min * (1.0 - 1e-9) || m > sm.q2_min * 1.01) exact.passed = false;
      exact.detail += cs[k].label + ": " + fmt(m) + " vs " + fmt(sm.q2_min) + "; ";
    }
    out.push_back(dip);
    out.push_back(exact);
  }
  if (name == "fig7") {
    FigureCheck mono{"marker decreases with gain", true, ""};
    FigureCheck cross{"marker crosses 1 at finite gain", true, ""};
    FigureCheck ord{"larger quality factor needs larger gain to cross 1", true, ""};
    std::optional<double> prev;
    for (const auto& cv : cs) {
      for (std::size_t i = 0; i + 1 < cv.y.size(); ++i)
        if (!(cv.y[i + 1] < cv.y[i])) mono.passed = false;
      const auto c = first_crossing(cv, 1.0, true);
      if (!c) cross.passed = false;
      cross.detail += cv.label + ": " + (c ? fmt(*c) : std::string("none")) + "; ";
      if (c && prev && !(*c > *prev)) ord.passed = false;
      if (c) prev = c;
    }
    out.push_back(mono);
    out.push_back(cross);
    out.push_back(ord);
  }
  return out;
}

FigureOutput run_figure(const std::string& name, const RunConfig& cfg, const std::string& out_dir) {
  layout(name);  // rejects unknown names before any work
  FigureOutput fo;
  fo.name = name;
  fo.rows = run_sweep(cfg);
  fo.checks = check_figure(name, cfg, fo.rows);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    fo.csv_path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
    fo.plot_path = (std::filesystem::path(out_dir) / (name + ".gp")).string();
    write_csv_file(fo.csv_path, fo.rows);
    std::ofstream gp(fo.plot_path);
    if (!gp) throw std::runtime_error("cannot write '" + fo.plot_path + "'");
    gp << plot_script(name, cfg, name + ".csv");
  }
  return fo;
}

}  // namespace optofb
