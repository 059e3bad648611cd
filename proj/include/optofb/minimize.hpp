// Bracketed scalar minimization over a positive variable.
#pragma once

#include <functional>

namespace optofb {

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
  int widenings = 0;
};

/// Minimizes `f` over x > 0. A logarithmic grid around `guess` locates a
/// bracket with an interior minimum (the window is shifted up to `max_widen`
/// times if the minimum sits on an edge); Brent's method then refines it in
/// linear coordinates. Throws SolverError if no interior bracket is found.
ScalarMinimum minimize_positive(const std::function<double(double)>& f, double guess,
                                int max_widen = 12);

}  // namespace optofb
