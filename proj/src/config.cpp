#include "optofb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace optofb {

ConfigError::ConfigError(const std::string& source, int line, const std::string& key,
                         const std::string& what)
    : DomainError(key, source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::spectral: return "spectral";
    case Method::lyapunov: return "lyapunov";
    case Method::ensemble: return "ensemble";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "analytic") return Method::analytic;
  if (s == "spectral") return Method::spectral;
  if (s == "lyapunov") return Method::lyapunov;
  if (s == "ensemble") return Method::ensemble;
  throw DomainError("method", "unknown method '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto s = trim(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw DomainError(key, "expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const auto s = trim(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    // accept integral values written in floating form, e.g. 1e5
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9e18) throw DomainError(key, "expected an integer, got '" + v + "'");
    return static_cast<long>(d);
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = trim(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw DomainError(key, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SweepSpec& sweep_of(RunConfig& c) {
  if (!c.sweep) c.sweep.emplace();
  return *c.sweep;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"theta", [](RunConfig& c, auto& k, auto& v) { c.theta = to_double(k, v); }},
      {"eta", [](RunConfig& c, auto& k, auto& v) { c.eta = to_double(k, v); }},
      {"quality", [](RunConfig& c, auto& k, auto& v) { c.quality = to_double(k, v); }},
      {"cutoff_ratio", [](RunConfig& c, auto& k, auto& v) { c.cutoff_ratio = to_double(k, v); }},
      {"gamma_c_over_omega_m",
       [](RunConfig& c, auto& k, auto& v) { c.gamma_c_over_omega_m = to_double(k, v); }},
      {"zeta", [](RunConfig& c, auto& k, auto& v) { c.zeta = to_double(k, v); }},
      {"scheme",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.scheme = scheme_from_string(trim(v));
         } catch (const std::invalid_argument&) {
           throw DomainError(k, "unknown scheme '" + trim(v) + "'");
         }
       }},
      {"gain", [](RunConfig& c, auto& k, auto& v) { c.gain = to_double(k, v); }},
      {"ring_zeta", [](RunConfig& c, auto& k, auto& v) { c.ring_zeta = to_double(k, v); }},
      {"log_correction", [](RunConfig& c, auto& k, auto& v) { c.log_correction = to_bool(k, v); }},
      {"sweep_variable", [](RunConfig& c, auto&, auto& v) { sweep_of(c).variable = trim(v); }},
      {"sweep_scale",
       [](RunConfig& c, auto& k, auto& v) {
         const auto s = trim(v);
         if (s != "log" && s != "linear") throw DomainError(k, "expected 'log' or 'linear'");
         sweep_of(c).log_scale = s == "log";
       }},
      {"sweep_min", [](RunConfig& c, auto& k, auto& v) { sweep_of(c).min = to_double(k, v); }},
      {"sweep_max", [](RunConfig& c, auto& k, auto& v) { sweep_of(c).max = to_double(k, v); }},
      {"sweep_points",
       [](RunConfig& c, auto& k, auto& v) { sweep_of(c).points = static_cast<int>(to_long(k, v)); }},
      {"series_variable", [](RunConfig& c, auto&, auto& v) { c.series_variable = trim(v); }},
      {"series",
       [](RunConfig& c, auto& k, auto& v) {
         c.series.clear();
         for (const auto& item : split_list(v)) c.series.push_back(to_double(k, item));
       }},
      {"method",
       [](RunConfig& c, auto& k, auto& v) {
         c.methods.clear();
         for (const auto& item : split_list(v)) {
           if (item == "all") {
             c.methods = {Method::analytic, Method::spectral, Method::lyapunov, Method::ensemble};
             return;
           }
           try {
             c.methods.push_back(method_from_string(item));
           } catch (const DomainError&) {
             throw DomainError(k, "unknown method '" + item + "'");
           }
         }
       }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out = trim(v); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) {
         const long s = to_long(k, v);
         if (s < 0) throw DomainError(k, "must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"form",
       [](RunConfig& c, auto& k, auto& v) {
         const auto s = trim(v);
         if (s == "full") c.form = SdeForm::full;
         else if (s == "adiabatic") c.form = SdeForm::adiabatic;
         else throw DomainError(k, "expected 'full' or 'adiabatic'");
       }},
      {"dt", [](RunConfig& c, auto& k, auto& v) { c.dt = to_double(k, v); }},
      {"n_steps", [](RunConfig& c, auto& k, auto& v) { c.n_steps = to_long(k, v); }},
      {"burn_in_steps", [](RunConfig& c, auto& k, auto& v) { c.burn_in_steps = to_long(k, v); }},
      {"n_traj", [](RunConfig& c, auto& k, auto& v) { c.n_traj = static_cast<int>(to_long(k, v)); }},
      {"substeps", [](RunConfig& c, auto& k, auto& v) { c.substeps = static_cast<int>(to_long(k, v)); }},
      {"noise_substeps",
       [](RunConfig& c, auto& k, auto& v) { c.noise_substeps = static_cast<int>(to_long(k, v)); }},
      {"integrator",
       [](RunConfig& c, auto& k, auto& v) {
         const auto s = trim(v);
         if (s == "exact") c.integrator = Integrator::exact;
         else if (s == "euler_maruyama") c.integrator = Integrator::euler_maruyama;
         else throw DomainError(k, "expected 'exact' or 'euler_maruyama'");
       }},
      {"threads", [](RunConfig& c, auto& k, auto& v) { c.threads = static_cast<int>(to_long(k, v)); }},
      {"dump_dir", [](RunConfig& c, auto&, auto& v) { c.dump_dir = trim(v); }},
      {"dump_count", [](RunConfig& c, auto& k, auto& v) { c.dump_count = static_cast<int>(to_long(k, v)); }},
      {"tol_rel", [](RunConfig& c, auto& k, auto& v) { c.tol_rel = to_double(k, v); }},
      {"tol_sigma", [](RunConfig& c, auto& k, auto& v) { c.tol_sigma = to_double(k, v); }},
      {"quad_rel_tol", [](RunConfig& c, auto& k, auto& v) { c.quad_rel_tol = to_double(k, v); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw DomainError(key, "unknown key");
  it->second(cfg, key, value);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "", "missing key before '='");
    try {
      apply_setting(cfg, key, value);
    } catch (const DomainError& e) {
      throw ConfigError(source, line, key, e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

bool is_sweepable(const std::string& v) {
  static const std::vector<std::string> names = {"zeta",  "gain",         "quality",
                                                 "theta", "eta",          "cutoff_ratio",
                                                 "gamma_c_over_omega_m"};
  return std::find(names.begin(), names.end(), v) != names.end();
}

void set_variable(RunConfig& cfg, const std::string& variable, double value) {
  if (variable == "zeta") {
    if (cfg.scheme == SchemeKind::RingRelative) cfg.ring_zeta = value;
    else cfg.zeta = value;
  } else if (variable == "gain") cfg.gain = value;
  else if (variable == "quality") cfg.quality = value;
  else if (variable == "theta") cfg.theta = value;
  else if (variable == "eta") cfg.eta = value;
  else if (variable == "cutoff_ratio") cfg.cutoff_ratio = value;
  else if (variable == "gamma_c_over_omega_m") cfg.gamma_c_over_omega_m = value;
  else throw DomainError("sweep_variable", "'" + variable + "' cannot be swept");
}

void validate(const RunConfig& c) {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(key, "must be positive and finite");
  };
  auto non_negative = [](const char* key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(key, "must be non-negative and finite");
  };
  non_negative("theta", c.theta);
  if (!(c.eta > 0.0 && c.eta <= 1.0)) throw DomainError("eta", "must lie in (0, 1]");
  positive("quality", c.quality);
  positive("cutoff_ratio", c.cutoff_ratio);
  positive("gamma_c_over_omega_m", c.gamma_c_over_omega_m);
  non_negative("zeta", c.zeta);
  non_negative("gain", c.gain);
  if (c.ring_zeta) non_negative("ring_zeta", *c.ring_zeta);
  if (c.sweep) {
    const auto& s = *c.sweep;
    if (!is_sweepable(s.variable)) throw DomainError("sweep_variable", "'" + s.variable + "' cannot be swept");
    if (s.points < 1) throw DomainError("sweep_points", "must be at least 1");
    if (!std::isfinite(s.min) || !std::isfinite(s.max)) throw DomainError("sweep_min", "range must be finite");
    if (s.max < s.min) throw DomainError("sweep_max", "must not be below sweep_min");
    if (s.log_scale && !(s.min > 0.0)) throw DomainError("sweep_min", "log sweep range must be positive");
    if (s.points > 1 && s.max == s.min) throw DomainError("sweep_max", "empty range for several points");
  }
  if (!c.series.empty()) {
    if (!is_sweepable(c.series_variable))
      throw DomainError("series_variable", "'" + c.series_variable + "' cannot be varied");
    if (c.sweep && c.sweep->variable == c.series_variable)
      throw DomainError("series_variable", "must differ from sweep_variable");
  }
  if (c.methods.empty()) throw DomainError("method", "at least one method required");
  if (c.dt < 0.0) throw DomainError("dt", "must be non-negative");
  if (c.n_steps < 0) throw DomainError("n_steps", "must be non-negative");
  if (c.burn_in_steps && *c.burn_in_steps < 0) throw DomainError("burn_in_steps", "must be non-negative");
  if (c.n_traj < 2) throw DomainError("n_traj", "need at least two trajectories");
  if (c.substeps < 1) throw DomainError("substeps", "must be at least 1");
  if (c.noise_substeps < 0 || (c.noise_substeps > 0 && c.noise_substeps % c.substeps != 0))
    throw DomainError("noise_substeps", "must be a positive multiple of substeps");
  if (c.threads < 0) throw DomainError("threads", "must be non-negative");
  if (c.dump_count < 0) throw DomainError("dump_count", "must be non-negative");
  positive("tol_rel", c.tol_rel);
  positive("tol_sigma", c.tol_sigma);
  positive("quad_rel_tol", c.quad_rel_tol);
}

SystemParams make_system(const RunConfig& c) {
  const auto bath = BathParams::make(c.theta, c.cutoff_ratio, c.eta);
  const double zeta = c.scheme == SchemeKind::RingRelative && c.ring_zeta ? *c.ring_zeta : c.zeta;
  return SystemParams::from_dimensionless(c.quality, zeta, bath, c.gamma_c_over_omega_m);
}

FeedbackScheme make_scheme(const RunConfig& c) {
  switch (c.scheme) {
    case SchemeKind::ColdDamping: return FeedbackScheme::cold_damping(c.gain);
    case SchemeKind::MomentumFeedback: return FeedbackScheme::momentum(c.gain);
    case SchemeKind::RingRelative: return FeedbackScheme::ring(c.gain, c.ring_zeta);
  }
  throw DomainError("scheme", "unsupported scheme");
}

std::vector<double> sweep_values(const SweepSpec& s) {
  std::vector<double> out;
  if (s.points == 1) return {s.min};
  out.reserve(s.points);
  for (int i = 0; i < s.points; ++i) {
    const double t = static_cast<double>(i) / (s.points - 1);
    if (s.log_scale) {
      const double lo = std::log10(s.min), hi = std::log10(s.max);
      out.push_back(i == s.points - 1 ? s.max : std::pow(10.0, lo + t * (hi - lo)));
    } else {
      out.push_back(i == s.points - 1 ? s.max : s.min + t * (s.max - s.min));
    }
  }
  if (s.log_scale) out.front() = s.min;
  return out;
}

}  // namespace optofb
