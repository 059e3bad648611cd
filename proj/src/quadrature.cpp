#include "optofb/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <queue>
#include <stdexcept>

namespace optofb {

namespace {

// Kronrod nodes and weights (15 points) with embedded 7-point Gauss weights.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * wgk[7];
  double resg = fc * wg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    f1[j] = f(c - dx);
    f2[j] = f(c + dx);
    resk += wgk[j] * (f1[j] + f2[j]);
    resabs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
  }
  evals += 15;
  const double mean = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = resk * h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                           const QuadratureOptions& opts) {
  if (breaks.size() < 2) throw std::invalid_argument("integrate: need at least two break points");
  QuadratureResult out;
  std::priority_queue<Segment> heap;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    heap.push(gk15(f, breaks[i], breaks[i + 1], out.evaluations));
  }

  auto totals = [&heap]() {
    // Sum in a fixed order so the result does not depend on heap layout.
    auto copy = heap;
    std::vector<Segment> segs;
    while (!copy.empty()) {
      segs.push_back(copy.top());
      copy.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    double v = 0.0, e = 0.0;
    for (const auto& s : segs) {
      v += s.value;
      e += s.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();

  while (!heap.empty() && error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    if (out.subdivisions >= opts.max_subdivisions) break;
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at floating-point resolution
    heap.pop();
    const Segment left = gk15(f, worst.a, mid, out.evaluations);
    const Segment right = gk15(f, mid, worst.b, out.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++out.subdivisions;
    if (out.subdivisions % 256 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  out.value = value;
  out.abs_error = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return out;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts) {
  if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity: lower bound must be positive");
  auto mapped = [&](double u) {
    const double x = a / u;
    return f(x) * a / (u * u);
  };
  return integrate(mapped, {0.0, 0.125, 0.5, 1.0}, opts);
}

}  // namespace optofb
