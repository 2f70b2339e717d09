#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockmax/mc.hpp"
#include "blockmax/version.hpp"

namespace blockmax::io {

// Filesystem- or stream-level failure; malformed content throws
// std::invalid_argument instead so callers can map the two differently.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest round-trip decimal form, identical wherever the number is printed.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace impl {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_value(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (field.empty())
    throw std::invalid_argument("csv: missing value at line " +
                                std::to_string(line_no));
  double x = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("csv: unparsable value '" + std::string(field) +
                                "' at line " + std::to_string(line_no));
  if (!std::isfinite(x))
    throw std::invalid_argument("csv: non-finite value at line " +
                                std::to_string(line_no));
  return x;
}

inline void check_iso_date(std::string_view d, std::size_t line_no) {
  bool ok = d.size() == 10 && d[4] == '-' && d[7] == '-';
  if (ok)
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
      ok = ok && std::isdigit(static_cast<unsigned char>(d[i]));
  if (!ok)
    throw std::invalid_argument("csv: expected an ISO date (YYYY-MM-DD) at line " +
                                std::to_string(line_no));
}

}  // namespace impl

// One-column `value` or two-column `date,value` CSV with a header row.
// Dates must be ISO-formatted and strictly increasing; they carry no other
// meaning here (blocks are index-based).
inline std::vector<double> read_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("csv: empty file " + path);
  const auto header = impl::trim(line);
  bool dated = false;
  if (header == "value") {
    dated = false;
  } else if (header == "date,value") {
    dated = true;
  } else {
    throw std::invalid_argument("csv: header must be 'value' or 'date,value', got '" +
                                std::string(header) + "'");
  }

  std::vector<double> values;
  std::string prev_date;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = impl::trim(line);
    if (row.empty() && in.eof()) break;  // trailing newline
    if (!dated) {
      if (row.find(',') != std::string_view::npos)
        throw std::invalid_argument("csv: unexpected extra column at line " +
                                    std::to_string(line_no));
      values.push_back(impl::parse_value(row, line_no));
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument("csv: expected 'date,value' at line " +
                                  std::to_string(line_no));
    const auto date = impl::trim(row.substr(0, comma));
    const auto rest = row.substr(comma + 1);
    if (rest.find(',') != std::string_view::npos)
      throw std::invalid_argument("csv: unexpected extra column at line " +
                                  std::to_string(line_no));
    impl::check_iso_date(date, line_no);
    if (!prev_date.empty() && !(prev_date < date))
      throw std::invalid_argument("csv: dates must be strictly increasing at line " +
                                  std::to_string(line_no));
    prev_date.assign(date);
    values.push_back(impl::parse_value(rest, line_no));
  }
  if (in.bad()) throw IoError("read failure on " + path);
  if (values.empty())
    throw std::invalid_argument("csv: no data rows in " + path);
  return values;
}

inline void write_values_csv(const std::string& path,
                             const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "value\n";
  for (double v : values) out << fmt17(v) << "\n";
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

// Experiment metrics with the generating configuration echoed as comments;
// content is a pure function of the spec, so identical runs give identical
// bytes.
inline void write_metrics_csv(std::ostream& out, const mc::ExperimentSpec& spec,
                              const mc::MetricsTable& table) {
  out << "# version = " << version << "\n";
  out << "# model = "
      << (spec.model.family == mc::ModelConfig::Family::gpd ? "armax-gpd"
                                                            : "armax-pareto")
      << "\n";
  out << (spec.model.family == mc::ModelConfig::Family::gpd ? "# gamma = "
                                                            : "# alpha = ")
      << fmt17(spec.model.shape) << "\n";
  out << "# beta = " << fmt17(spec.model.beta) << "\n";
  out << "# target = " << mc::target_kind_name(spec.target.kind);
  if (spec.target.kind == mc::TargetKind::return_level)
    out << "(T=" << fmt17(spec.target.horizon) << ")";
  out << "\n";
  out << "# r = " << spec.r << "\n";
  out << "# N = " << spec.N << "\n";
  out << "# B = " << spec.B << "\n";
  out << "# level = " << fmt17(spec.level) << "\n";
  out << "# seed = " << spec.seed << "\n";
  out << "# true_value = " << fmt17(table.true_value) << "\n";
  out << "method,m,mse,variance,bias_sq,coverage,avg_width,rel_mse,rel_width\n";
  for (const auto& row : table.rows) {
    out << row.method << "," << row.m << "," << fmt17(row.mse) << ","
        << fmt17(row.variance) << "," << fmt17(row.bias_sq) << ","
        << fmt17(row.coverage) << "," << fmt17(row.avg_width) << ","
        << fmt17(row.rel_mse) << "," << fmt17(row.rel_width) << "\n";
  }
}

}  // namespace blockmax::io
