#include "optofb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace optofb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x coth x, even in x.
double xcothx(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 + ax * ax / 3.0;
  if (ax > 40.0) return ax;
  return ax / std::tanh(ax);
}

// x coth x - 1 without cancellation near x = 0.
double xcothx_minus_one(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = ax * ax;
    return x2 / 3.0 - x2 * x2 / 45.0;
  }
  return xcothx(ax) - 1.0;
}

double band_gain(double w, double half, FilterShape shape) {
  const double aw = std::abs(w);
  switch (shape) {
    case FilterShape::brick_wall: return std::abs(aw - 1.0) < half ? 1.0 : 0.0;
    case FilterShape::lorentzian: {
      const double full = 2.0 * half;
      const double d = 1.0 - aw * aw;
      return aw * aw * full * full / (d * d + aw * aw * full * full);
    }
    case FilterShape::butterworth2: {
      if (aw == 0.0) return 0.0;
      const double r = (1.0 - aw * aw) / (2.0 * half * aw);
      const double r2 = r * r;
      return 1.0 / (1.0 + r2 * r2);
    }
  }
  return 1.0;
}

bool momentum_kernels(const FeedbackScheme& scheme) {
  return scheme.kind != SchemeKind::ColdDamping;
}

double effective_zeta(const FeedbackScheme& scheme, const SystemParams& sys) {
  if (scheme.kind == SchemeKind::RingRelative && scheme.ring_zeta) return *scheme.ring_zeta;
  return sys.zeta;
}

// Weights multiplying a position-equation density S_Q and a momentum-equation
// density S_P in the integrand of each moment (before the 1/|D|^2 factor).
struct KernelWeights {
  double s_q;
  double s_p;
};

KernelWeights kernel_weights(const FeedbackScheme& scheme, Moment moment, double gamma, double w) {
  const double g = scheme.gain;
  const double w2 = w * w;
  if (!momentum_kernels(scheme)) {
    switch (moment) {
      case Moment::q2: return {0.0, 1.0};
      case Moment::p2: return {0.0, w2};
      case Moment::qp: return {0.0, 0.0};
    }
  }
  switch (moment) {
    case Moment::q2: return {w2 + gamma * gamma, 1.0};
    case Moment::p2: return {1.0, w2 + gamma * gamma * g * g};
    case Moment::qp: return {-gamma, gamma * g};
  }
  return {0.0, 0.0};
}

std::vector<double> split_points(const Susceptibility& chi, double upper,
                                 const SpectralOptions& opts) {
  const double om = chi.resonance();
  const double width = chi.width();
  std::vector<double> pts{0.0, om};
  for (double k = 1.0; k < 1e30; k *= 10.0) {
    const double d = width * k;
    if (om - d > 0.0) pts.push_back(om - d);
    pts.push_back(om + d);
    if (d > 10.0 * std::max(om, upper == kInf ? om : upper)) break;
  }
  const double smallest = std::min({1.0, width, 1.0 / width});
  const int lo = static_cast<int>(std::floor(std::log10(smallest))) - 3;
  const double top = upper == kInf ? 100.0 * std::max({om, width, 1.0}) : upper;
  for (int k = lo; std::pow(10.0, k) < top; ++k) pts.push_back(std::pow(10.0, k));
  if (opts.filter == FeedbackFilter::band_limited) {
    const double h = opts.band_halfwidth;
    for (double m : {-10.0, -1.0, 1.0, 10.0})
      if (1.0 + m * h > 0.0) pts.push_back(1.0 + m * h);
  }
  pts.push_back(top);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (p < 0.0 || p > top) continue;
    if (!out.empty() && p <= out.back() * (1.0 + 1e-12)) continue;
    out.push_back(p);
  }
  return out;
}

SpectralResult integrate_even(const std::function<double(double)>& f, const Susceptibility& chi,
                              double upper, const SpectralOptions& opts) {
  SpectralResult r;
  r.split_points = split_points(chi, upper, opts);
  const auto body = integrate(f, r.split_points, opts.quad);
  r.value = body.value;
  r.abs_error_estimate = body.abs_error;
  r.n_evaluations = body.evaluations;
  r.converged = body.converged;
  if (upper == kInf) {
    const auto tail = integrate_to_infinity(f, r.split_points.back(), opts.quad);
    r.value += tail.value;
    r.abs_error_estimate += tail.abs_error;
    r.n_evaluations += tail.evaluations;
    r.converged = r.converged && tail.converged;
  }
  // even integrand: double the half-line result
  r.value *= 2.0;
  r.abs_error_estimate *= 2.0;
  return r;
}

void add_into(SpectralResult& acc, const SpectralResult& part) {
  acc.value += part.value;
  acc.abs_error_estimate += part.abs_error_estimate;
  acc.n_evaluations += part.n_evaluations;
  acc.converged = acc.converged && part.converged;
  acc.split_points.insert(acc.split_points.end(), part.split_points.begin(),
                          part.split_points.end());
}

}  // namespace

Susceptibility::Susceptibility(const FeedbackScheme& scheme, double quality) : scheme_(scheme) {
  if (!(quality > 0.0)) throw DomainError("quality", "must be positive");
  const double gamma = 1.0 / quality;
  omega_sq_ = momentum_kernels(scheme) ? 1.0 + gamma * gamma * scheme.gain : 1.0;
  width_ = gamma * (1.0 + scheme.gain);
}

std::complex<double> Susceptibility::operator()(double w) const {
  return 1.0 / std::complex<double>(omega_sq_ - w * w, w * width_);
}

double Susceptibility::norm_sq(double w) const {
  const double re = omega_sq_ - w * w;
  const double im = w * width_;
  return 1.0 / (re * re + im * im);
}

NoiseSpectrum::NoiseSpectrum(NoiseSource kind, const FeedbackScheme& scheme,
                             const SystemParams& sys, const SpectralOptions& opts)
    : kind_(kind), gamma_(1.0 / sys.quality()), cutoff_(kInf), opts_(opts) {
  const double zeta = effective_zeta(scheme, sys);
  switch (kind) {
    case NoiseSource::back_action: level_ = gamma_ * zeta / 4.0; break;
    case NoiseSource::feedback: {
      const double g = scheme.gain;
      if (g > 0.0) {
        if (!(zeta > 0.0)) throw DomainError("zeta", "feedback noise diverges at zero input power");
        level_ = gamma_ * g * g / (4.0 * sys.bath.eta * zeta);
      }
      drives_position_ = momentum_kernels(scheme);
      filtered_ = !drives_position_;
      break;
    }
    case NoiseSource::thermal:
      theta_ = sys.bath.theta;
      cutoff_ = opts.thermal == ThermalModel::full_coth ? sys.bath.cutoff_frequency() : kInf;
      break;
    case NoiseSource::all: throw DomainError("source", "NoiseSpectrum needs a single source");
  }
}

double NoiseSpectrum::operator()(double w) const {
  switch (kind_) {
    case NoiseSource::back_action: return level_;
    case NoiseSource::feedback: {
      if (!filtered_) return level_;
      switch (opts_.filter) {
        case FeedbackFilter::resonance_peak: return level_;
        case FeedbackFilter::ideal_derivative: return level_ * w * w;
        case FeedbackFilter::band_limited:
          return level_ * w * w * band_gain(w, opts_.band_halfwidth, opts_.shape);
      }
      return level_;
    }
    case NoiseSource::thermal: {
      if (std::abs(w) >= cutoff_) return 0.0;
      if (opts_.thermal == ThermalModel::classical) return gamma_ * theta_;
      if (theta_ == 0.0) return 0.5 * gamma_ * std::abs(w);
      return gamma_ * theta_ * xcothx(w / (2.0 * theta_));
    }
    case NoiseSource::all: break;
  }
  return 0.0;
}

double spectral_integrand(const FeedbackScheme& scheme, Moment moment, NoiseSource source,
                          const SystemParams& sys, double w, const SpectralOptions& opts) {
  if (source == NoiseSource::all) {
    double sum = 0.0;
    for (auto s : {NoiseSource::back_action, NoiseSource::feedback, NoiseSource::thermal})
      sum += spectral_integrand(scheme, moment, s, sys, w, opts);
    return sum;
  }
  const Susceptibility chi(scheme, sys.quality());
  const NoiseSpectrum spec(source, scheme, sys, opts);
  const auto kw = kernel_weights(scheme, moment, 1.0 / sys.quality(), w);
  const double weight = spec.drives_position() ? kw.s_q : kw.s_p;
  return weight * spec(w) * chi.norm_sq(w) / (2.0 * std::numbers::pi);
}

SpectralResult variance_integral(const FeedbackScheme& scheme, Moment moment, NoiseSource source,
                                 const SystemParams& sys, const SpectralOptions& opts) {
  if (!(scheme.gain >= 0.0)) throw DomainError("gain", "must be non-negative");
  if (source == NoiseSource::all) {
    SpectralResult acc;
    for (auto s : {NoiseSource::back_action, NoiseSource::feedback, NoiseSource::thermal}) {
      if (s == NoiseSource::feedback && scheme.gain == 0.0) continue;
      if (s == NoiseSource::thermal && sys.bath.theta == 0.0) continue;
      add_into(acc, variance_integral(scheme, moment, s, sys, opts));
    }
    std::sort(acc.split_points.begin(), acc.split_points.end());
    acc.split_points.erase(std::unique(acc.split_points.begin(), acc.split_points.end()),
                           acc.split_points.end());
    return acc;
  }
  if (source == NoiseSource::thermal && !(sys.bath.theta > 0.0))
    throw DomainError("theta", "thermal source needs theta > 0");

  const Susceptibility chi(scheme, sys.quality());
  const NoiseSpectrum spec(source, scheme, sys, opts);
  const double gamma = 1.0 / sys.quality();
  const bool pos = spec.drives_position();
  auto f = [&](double w) {
    const auto kw = kernel_weights(scheme, moment, gamma, w);
    return (pos ? kw.s_q : kw.s_p) * spec(w) * chi.norm_sq(w) / (2.0 * std::numbers::pi);
  };
  return integrate_even(f, chi, spec.cutoff(), opts);
}

LogCorrectionProbe log_correction_probe(const SystemParams& sys, const FeedbackScheme& scheme,
                                        const std::vector<double>& ladder,
                                        const QuadratureOptions& quad) {
  if (ladder.size() < 2) throw DomainError("cutoff_ratio", "ladder needs at least two values");
  const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
  if (*hi / *lo < 100.0 * (1.0 - 1e-12))
    throw DomainError("cutoff_ratio", "ladder must span at least two decades");
  if (*lo < 10.0)
    throw DomainError("cutoff_ratio", "logarithmic regime needs hbar varpi >> k_B T (ratio >= 10)");
  if (sys.bath.theta < 10.0)
    throw DomainError("theta", "logarithmic regime needs k_B T >> hbar omega_m (theta >= 10)");

  LogCorrectionProbe probe;
  probe.reference_slope = 1.0 / (std::numbers::pi * sys.quality());
  const double gamma = 1.0 / sys.quality();
  const double theta = sys.bath.theta;
  const Susceptibility chi(scheme, sys.quality());

  SpectralOptions opts;
  opts.quad = quad;
  for (double ratio : ladder) {
    const double varpi = ratio * theta;
    auto excess = [&](Moment m) {
      auto f = [&, m](double w) {
        const auto kw = kernel_weights(scheme, m, gamma, w);
        const double classical = gamma * theta;
        const double ds = std::abs(w) < varpi ? classical * xcothx_minus_one(w / (2.0 * theta))
                                              : -classical;
        return kw.s_p * ds * chi.norm_sq(w) / (2.0 * std::numbers::pi);
      };
      // body up to the cutoff, then the (negative) classical tail beyond it
      const auto body = integrate_even(f, chi, varpi, opts);
      const auto tail = integrate_to_infinity(f, varpi, quad);
      return body.value + 2.0 * tail.value;
    };
    probe.cutoff_ratios.push_back(ratio);
    probe.p2_residuals.push_back(excess(Moment::p2));
    probe.q2_residuals.push_back(excess(Moment::q2));
  }

  auto fit = [&](const std::vector<double>& ys) {
    const std::size_t n = ys.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::log(probe.cutoff_ratios[i] * theta);
      sx += x;
      sy += ys[i];
      sxx += x * x;
      sxy += x * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  probe.p2_slope = fit(probe.p2_residuals);
  probe.q2_slope = fit(probe.q2_residuals);
  return probe;
}

BandFilterEffect detection_band_filter_effect(const SystemParams& sys, double g2,
                                              double band_halfwidth, FilterShape shape,
                                              Moment moment) {
  if (!(band_halfwidth > 0.0)) throw DomainError("band", "must be positive");
  const auto scheme = FeedbackScheme::cold_damping(g2);
  BandFilterEffect out;
  SpectralOptions flat;
  out.flat_value = variance_integral(scheme, moment, NoiseSource::feedback, sys, flat).value;
  SpectralOptions band;
  band.filter = FeedbackFilter::band_limited;
  band.shape = shape;
  band.band_halfwidth = band_halfwidth;
  out.filtered = variance_integral(scheme, moment, NoiseSource::feedback, sys, band);
  out.deviation = std::abs(out.filtered.value - out.flat_value) / out.flat_value;
  out.inside_regime = band_halfwidth > (1.0 + g2) / sys.quality();
  return out;
}

}  // namespace optofb
