#pragma once

// CSV and JSON serialization of sweep records and equilibrium distributions.
// Requires nlohmann/json.

#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <locale>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinex/errors.hpp"
#include "kinex/experiments.hpp"
#include "kinex/kernel.hpp"

namespace kinex::io {

inline constexpr const char* kRecordHeader =
    "tau_min,tau_max,gamma,w_ratio,gini,tax_revenue,mu,residual";

/// Fixed 6 significant digits.
inline std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(6) << v;
  return os.str();
}

inline void write_records_csv(std::ostream& os, std::span<const SweepRecord> records) {
  os << kRecordHeader << '\n';
  for (const auto& r : records) {
    os << format_number(r.tau_min) << ',' << format_number(r.tau_max) << ','
       << format_number(r.gamma) << ',' << format_number(r.w_ratio) << ','
       << format_number(r.gini) << ',' << format_number(r.tax_revenue) << ','
       << format_number(r.mu) << ',' << format_number(r.residual) << '\n';
  }
}

namespace detail {

// JSON has no NaN; failed points carry null.
inline nlohmann::json number_or_null(double v) {
  if (v != v) return nullptr;
  return v;
}

inline double parse_number(const std::string& cell) {
  if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("records csv: not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw InvalidArgument("records csv: not a number: '" + cell + "'");
  return v;
}

}  // namespace detail

inline nlohmann::json record_to_json(const SweepRecord& r) {
  using detail::number_or_null;
  nlohmann::json j;
  j["tau_min"] = r.tau_min;
  j["tau_max"] = r.tau_max;
  j["gamma"] = r.gamma;
  j["w_ratio"] = r.w_ratio;
  j["gini"] = number_or_null(r.gini);
  j["tax_revenue"] = number_or_null(r.tax_revenue);
  j["mu"] = number_or_null(r.mu);
  j["residual"] = number_or_null(r.residual);
  j["converged"] = r.converged;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::json records_to_json(std::span<const SweepRecord> records) {
  nlohmann::json doc;
  doc["records"] = nlohmann::json::array();
  for (const auto& r : records) doc["records"].push_back(record_to_json(r));
  return doc;
}

inline void write_records_json(std::ostream& os, std::span<const SweepRecord> records) {
  os << records_to_json(records).dump(2) << '\n';
}

/// Reads back a records CSV as written by write_records_csv. Rows whose gini
/// is nan are marked not converged. A blank line ends the table.
inline std::vector<SweepRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("records csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordHeader) throw InvalidArgument("records csv: unexpected header '" + line + "'");
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;  // end of table
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw InvalidArgument("records csv: expected 8 columns in '" + line + "'");
    SweepRecord r;
    r.tau_min = detail::parse_number(cells[0]);
    r.tau_max = detail::parse_number(cells[1]);
    r.gamma = detail::parse_number(cells[2]);
    r.w_ratio = detail::parse_number(cells[3]);
    r.gini = detail::parse_number(cells[4]);
    r.tax_revenue = detail::parse_number(cells[5]);
    r.mu = detail::parse_number(cells[6]);
    r.residual = detail::parse_number(cells[7]);
    r.converged = r.gini == r.gini;
    out.push_back(std::move(r));
  }
  return out;
}

/// Per-class equilibrium table; class_index is 1-based.
inline void write_distribution_csv(std::ostream& os, const ClassLadder& ladder,
                                   std::span<const double> x) {
  if (x.size() != ladder.size()) throw InvalidArgument("write_distribution_csv: size mismatch");
  os << "class_index,r,x_hat\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << (i + 1) << ',' << format_number(ladder[i]) << ',' << format_number(x[i]) << '\n';
  }
}

inline nlohmann::json fit_to_json(const FitResult& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

}  // namespace kinex::io
