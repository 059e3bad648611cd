// Globally adaptive 15-point Gauss-Kronrod quadrature.
#pragma once

#include <functional>
#include <vector>

namespace optofb {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_subdivisions = 20000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

/// Integrates f over the union of [breaks[i], breaks[i+1]]. The interval with
/// the largest error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol * |value|). Subdivision order is deterministic.
QuadratureResult integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                           const QuadratureOptions& opts = {});

/// Integrates f over [a, inf) via the substitution x = a / u, u in (0, 1].
/// Requires a > 0.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts = {});

}  // namespace optofb
