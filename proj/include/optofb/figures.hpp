// Reproduction of the standard figure set: data, gnuplot script, shape checks.
#pragma once

#include <string>
#include <vector>

#include "optofb/config.hpp"
#include "optofb/csv.hpp"

namespace optofb {

struct FigureCheck {
  std::string description;
  bool passed = false;
  std::string detail;
};

struct FigureOutput {
  std::string name;
  std::vector<SweepRow> rows;
  std::vector<FigureCheck> checks;
  std::string csv_path;
  std::string plot_path;
  bool passed() const;
};

const std::vector<std::string>& figure_names();

/// Default configuration of a figure (sweep, series, theta = 1e5, eta = 0.8).
/// Throws DomainError("figure", ...) for unknown names.
RunConfig figure_defaults(const std::string& name);

/// gnuplot script plotting `csv_file` for the figure.
std::string plot_script(const std::string& name, const RunConfig& cfg, const std::string& csv_file);

/// Qualitative assertions on the analytic rows of a figure.
std::vector<FigureCheck> check_figure(const std::string& name, const RunConfig& cfg,
                                      const std::vector<SweepRow>& rows);

/// Runs the sweep, writes `<out_dir>/<name>.csv` and `<out_dir>/<name>.gp`
/// (skipped when out_dir is empty) and evaluates the checks.
FigureOutput run_figure(const std::string& name, const RunConfig& cfg, const std::string& out_dir);

}  // namespace optofb
