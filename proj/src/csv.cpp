#include "optofb/csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace optofb {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> h = {
      "series",      "x",         "q2",       "p2",       "qp_sym",
      "energy_units", "occupancy", "contractive", "squeezed", "entangled",
      "entanglement_marker", "method"};
  return h;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto& h = csv_header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    if (r.series.find_first_of(",\n\"") != std::string::npos || r.method.find_first_of(",\n\"") != std::string::npos)
      throw std::runtime_error("write_csv: labels must not contain commas, quotes or newlines");
    out << r.series << ',' << format_double(r.x) << ',' << format_double(r.q2) << ','
        << format_double(r.p2) << ',' << format_double(r.qp_sym) << ','
        << format_double(r.energy_units) << ',' << opt(r.occupancy) << ',' << int(r.contractive)
        << ',' << int(r.squeezed) << ',' << int(r.entangled) << ',' << opt(r.entanglement_marker)
        << ',' << r.method << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, rows);
}

namespace {

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

bool parse_flag(const std::string& s, int line) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::runtime_error("csv line " + std::to_string(line) + ": bad flag '" + s + "'");
}

}  // namespace

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string text;
  int line = 0;
  std::vector<SweepRow> rows;
  const auto& h = csv_header();
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!text.empty() && text.back() == ',') cells.emplace_back();
    if (cells.size() != h.size())
      throw std::runtime_error("csv line " + std::to_string(line) + ": expected " +
                               std::to_string(h.size()) + " columns");
    if (line == 1) {
      if (cells != h) throw std::runtime_error("csv: unexpected header");
      continue;
    }
    SweepRow r;
    r.series = cells[0];
    r.x = parse_double(cells[1], line);
    r.q2 = parse_double(cells[2], line);
    r.p2 = parse_double(cells[3], line);
    r.qp_sym = parse_double(cells[4], line);
    r.energy_units = parse_double(cells[5], line);
    if (!cells[6].empty()) r.occupancy = parse_double(cells[6], line);
    r.contractive = parse_flag(cells[7], line);
    r.squeezed = parse_flag(cells[8], line);
    r.entangled = parse_flag(cells[9], line);
    if (!cells[10].empty()) r.entanglement_marker = parse_double(cells[10], line);
    r.method = cells[11];
    rows.push_back(std::move(r));
  }
  if (line == 0) throw std::runtime_error("csv: empty input");
  return rows;
}

std::vector<SweepRow> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return read_csv(in);
}

}  // namespace optofb
