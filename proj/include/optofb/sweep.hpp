// Evaluating configurations by several methods and sweeping one variable.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optofb/config.hpp"
#include "optofb/csv.hpp"

namespace optofb {

/// Second moments from one method. `q2_err` etc. are standard errors for the
/// ensemble, quadrature error estimates for the spectral route, zero otherwise.
struct MomentSet {
  Method method = Method::analytic;
  double q2 = 0.0, p2 = 0.0, qp = 0.0;
  double q2_err = 0.0, p2_err = 0.0, qp_err = 0.0;
  std::optional<double> occupancy;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Fills in the optimal ring power when the ring scheme has none set.
RunConfig resolve(const RunConfig& cfg);

MomentSet evaluate(const RunConfig& cfg, Method method);

/// Ensemble options implied by the configuration for a given SDE.
EnsembleOptions ensemble_options(const RunConfig& cfg, const LinearSDE& sde);

SweepRow make_row(const RunConfig& cfg, const MomentSet& m, const std::string& series, double x);

/// One row per (series value, swept value, method), ordered by series, then
/// swept value, then method. Points are evaluated concurrently.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

std::string series_label(const std::string& variable, double value);

}  // namespace optofb
