#include "optofb/minimize.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "optofb/model.hpp"

namespace optofb {

ScalarMinimum minimize_positive(const std::function<double(double)>& f, double guess,
                                int max_widen) {
  if (!(guess > 0.0) || !std::isfinite(guess)) throw DomainError("guess", "must be positive");
  constexpr int half_width = 12;  // grid spans guess * 10^(+-3) at quarter-decade spacing
  constexpr double step = 0.25;

  ScalarMinimum out;
  double center = std::log10(guess);
  for (int attempt = 0; attempt <= max_widen; ++attempt) {
    std::vector<double> xs, fs;
    for (int k = -half_width; k <= half_width; ++k) {
      const double x = std::pow(10.0, center + k * step);
      xs.push_back(x);
      fs.push_back(f(x));
      ++out.evaluations;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fs.size(); ++i)
      if (fs[i] < fs[best]) best = i;

    if (best == 0 || best + 1 == fs.size()) {
      center += (best == 0 ? -1.0 : 1.0) * half_width * step;
      ++out.widenings;
      continue;
    }

    boost::uintmax_t iters = 500;
    auto [x, fx] = boost::math::tools::brent_find_minima(
        [&](double v) {
          ++out.evaluations;
          return f(v);
        },
        xs[best - 1], xs[best + 1], std::numeric_limits<double>::digits / 2, iters);
    out.x = x;
    out.fx = fx;
    return out;
  }
  throw SolverError("minimization bracket not found after widening");
}

}  // namespace optofb
