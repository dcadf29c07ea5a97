#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kexpm/bounds.hpp"

namespace kexpm {

namespace detail {

// Shortest round-trip decimal form (std::to_chars); "inf"/"nan" spelled out.
inline std::string number_field(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_field(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

inline std::optional<double> optional_of(double x) {
  if (std::isnan(x)) return std::nullopt;
  return x;
}

}  // namespace detail

inline constexpr const char* kConvergenceCsvHeader =
    "k,err_true,est_post,bnd_prior,q_used,bnd_saad,bnd_hl";

inline void write_records_csv(std::ostream& out,
                              const std::vector<ConvergenceRecord>& records) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out << kConvergenceCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << detail::number_field(r.err_true.value_or(nan)) << ','
        << detail::number_field(r.est_post) << ',' << detail::number_field(r.bnd_prior)
        << ',' << detail::number_field(r.q_used) << ','
        << detail::number_field(r.bnd_saad.value_or(nan)) << ','
        << detail::number_field(r.bnd_hl.value_or(nan)) << '\n';
  }
}

inline std::vector<ConvergenceRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kConvergenceCsvHeader)
    throw std::runtime_error("convergence CSV: missing or wrong header line");
  std::vector<ConvergenceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw std::runtime_error("convergence CSV: expected 7 fields, got line '" + line + "'");
    ConvergenceRecord r;
    r.k = std::stoi(fields[0]);
    r.err_true = detail::optional_of(detail::parse_field(fields[1]));
    r.est_post = detail::parse_field(fields[2]);
    r.bnd_prior = detail::parse_field(fields[3]);
    r.q_used = detail::parse_field(fields[4]);
    r.bnd_saad = detail::optional_of(detail::parse_field(fields[5]));
    r.bnd_hl = detail::optional_of(detail::parse_field(fields[6]));
    records.push_back(r);
  }
  return records;
}

}  // namespace kexpm
