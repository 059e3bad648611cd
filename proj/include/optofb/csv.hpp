// Sweep rows and their CSV form (17 significant digits, lossless for doubles).
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace optofb {

struct SweepRow {
  std::string series;  ///< label of the curve, e.g. "gain=1000"
  double x = 0.0;      ///< swept value
  double q2 = 0.0;
  double p2 = 0.0;
  double qp_sym = 0.0;
  double energy_units = 0.0;
  std::optional<double> occupancy;
  bool contractive = false;
  bool squeezed = false;
  bool entangled = false;
  std::optional<double> entanglement_marker;
  std::string method = "analytic";

  bool operator==(const SweepRow&) const = default;
};

/// Decimal text with 17 significant digits; reads back to the same double.
std::string format_double(double v);

const std::vector<std::string>& csv_header();
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows);
/// Throws std::runtime_error on malformed input.
std::vector<SweepRow> read_csv(std::istream& in);
std::vector<SweepRow> read_csv_file(const std::string& path);

}  // namespace optofb
