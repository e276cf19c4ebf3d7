#ifndef BNPCC_IO_HPP
#define BNPCC_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bnpcc/error.hpp"
#include "bnpcc/posterior.hpp"
#include "bnpcc/pseudo.hpp"
#include "bnpcc/sampler.hpp"

namespace bnpcc {

/// Numeric CSV with a header row. Empty fields read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> values(std::size_t col) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[col]);
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_field(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "' as a number");
  return value;
}

inline std::string format_double(double value) {
  if (std::isnan(value)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line[0] == '#') continue;
    const auto fields = detail::split(line);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size())
      throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(detail::parse_field(f, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ValidationError("CSV file is empty");
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return parse_csv(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << detail::format_double(v);
    first = false;
  }
  out << '\n';
}

/// What the fit command reads: either raw responses (y1, y2, x) or
/// pseudo-observations (u, v, x). u,v take precedence when both exist.
struct InputData {
  bool is_pseudo = false;
  Dataset raw;
  PseudoDataset pseudo;
};

inline InputData load_input(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty()) throw ValidationError(path + ": no data rows");
  const auto require = [&](std::string_view name) {
    const auto col = table.column(name);
    if (!col) throw ValidationError(path + ": missing column '" + std::string(name) + "'");
    return table.values(*col);
  };
  InputData data;
  std::vector<double> x = require("x");
  if (table.column("u") && table.column("v")) {
    data.is_pseudo = true;
    data.pseudo = {require("u"), require("v"), std::move(x)};
    for (double value : data.pseudo.u)
      if (std::isnan(value)) throw ValidationError(path + ": missing value in column 'u'");
    for (double value : data.pseudo.v)
      if (std::isnan(value)) throw ValidationError(path + ": missing value in column 'v'");
    data.pseudo.validate();
  } else {
    if (!table.column("y1")) throw ValidationError(path + ": missing column 'y1' (or 'u')");
    data.raw = {require("y1"), require("y2"), std::move(x)};
    data.raw.validate();
  }
  return data;
}

inline void write_pseudo_csv(const std::string& path, const PseudoDataset& data) {
  auto out = open_output(path);
  out << "u,v,x\n";
  for (std::size_t i = 0; i < data.size(); ++i) write_row(out, {data.u[i], data.v[i], data.x[i]});
}

/// Trace layout, one row per kept iteration:
///
///   iter,dstar,k,w1..wK,n1..nK,b1_1..b1_d,...,bK_1..bK_d
///
/// K is the largest instantiated-component count in the trace; rows with
/// fewer components leave the trailing fields empty. d is 2 (quadratic) or
/// 4 (expbump) and identifies the calibration family.
inline void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  std::size_t kmax = 0;
  for (const auto& draw : trace.draws) kmax = std::max(kmax, draw.weights.size());
  const std::size_t dim = trace.spec.dim();

  out << "iter,dstar,k";
  for (std::size_t j = 1; j <= kmax; ++j) out << ",w" << j;
  for (std::size_t j = 1; j <= kmax; ++j) out << ",n" << j;
  for (std::size_t j = 1; j <= kmax; ++j)
    for (std::size_t c = 1; c <= dim; ++c) out << ",b" << j << '_' << c;
  out << '\n';

  for (const auto& draw : trace.draws) {
    const std::size_t k = draw.weights.size();
    out << draw.iteration << ',' << draw.occupied << ',' << k;
    for (std::size_t j = 0; j < kmax; ++j) out << ',' << (j < k ? detail::format_double(draw.weights[j]) : "");
    for (std::size_t j = 0; j < kmax; ++j) out << ',' << (j < k ? std::to_string(draw.occupancy[j]) : "");
    for (std::size_t j = 0; j < kmax; ++j)
      for (std::size_t c = 0; c < dim; ++c) out << ',' << (j < k ? detail::format_double(draw.atoms[j][c]) : "");
    out << '\n';
  }
}

inline void write_trace_csv(const std::string& path, const ChainTrace& trace) {
  auto out = open_output(path);
  write_trace_csv(out, trace);
}

inline ChainTrace parse_trace(const CsvTable& table) {
  const auto iter_col = table.column("iter");
  const auto dstar_col = table.column("dstar");
  const auto k_col = table.column("k");
  if (!iter_col || !dstar_col || !k_col) throw ValidationError("trace is missing iter/dstar/k columns");
  std::size_t kmax = 0;
  while (table.column("w" + std::to_string(kmax + 1))) ++kmax;
  std::size_t dim = 0;
  while (table.column("b1_" + std::to_string(dim + 1))) ++dim;
  const auto spec = CalibrationSpec::from_dim(dim);
  if (!spec) throw ValidationError("trace atoms have dimension " + std::to_string(dim) + "; expected 2 or 4");
  if (table.rows.empty()) throw ValidationError("trace has no iterations");

  ChainTrace trace{*spec, {}, {}, 0.0};
  for (const auto& row : table.rows) {
    TraceDraw draw;
    const double k_value = row[*k_col];
    if (!(k_value >= 1.0) || k_value > static_cast<double>(kmax) || k_value != std::floor(k_value))
      throw ValidationError("trace row has an invalid component count");
    const auto k = static_cast<std::size_t>(k_value);
    draw.iteration = static_cast<std::size_t>(row[*iter_col]);
    draw.occupied = static_cast<std::size_t>(row[*dstar_col]);
    for (std::size_t j = 0; j < k; ++j) {
      const double w = row[*table.column("w" + std::to_string(j + 1))];
      const double n = row[*table.column("n" + std::to_string(j + 1))];
      std::vector<double> beta(dim);
      for (std::size_t c = 0; c < dim; ++c)
        beta[c] = row[*table.column("b" + std::to_string(j + 1) + "_" + std::to_string(c + 1))];
      if (!(w > 0.0) || !(n >= 0.0)) throw ValidationError("trace row has a missing or invalid weight/occupancy");
      draw.weights.push_back(w);
      draw.occupancy.push_back(static_cast<std::size_t>(n));
      draw.atoms.emplace_back(std::move(beta));
    }
    trace.draws.push_back(std::move(draw));
  }
  return trace;
}

inline ChainTrace read_trace_csv(const std::string& path) {
  try {
    return parse_trace(read_csv(path));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw ValidationError(path + ": " + what);
  }
}

inline void write_tau_curve_csv(const std::string& path, const TauCurve& curve) {
  auto out = open_output(path);
  out << "x,mean,lower95,upper95\n";
  for (std::size_t i = 0; i < curve.x_grid.size(); ++i)
    write_row(out, {curve.x_grid[i], curve.mean[i], curve.lower95[i], curve.upper95[i]});
}

inline void write_components_csv(const std::string& path, const ComponentSummary& summary) {
  auto out = open_output(path);
  out << "iter,dstar,w1,w2\n";
  for (std::size_t t = 0; t < summary.iterations.size(); ++t)
    out << summary.iterations[t] << ',' << summary.occupied[t] << ',' << detail::format_double(summary.top_weight[t])
        << ',' << detail::format_double(summary.second_weight[t]) << '\n';
}

/// predictive.csv: x,u,v and, with reference columns, y1,y2 on the data scale.
inline void write_predictive_csv(const std::string& path, const std::vector<PredictiveDraw>& draws,
                                 const std::vector<double>* ref_y1 = nullptr,
                                 const std::vector<double>* ref_y2 = nullptr) {
  auto out = open_output(path);
  const bool with_y = ref_y1 != nullptr && ref_y2 != nullptr;
  out << (with_y ? "x,u,v,y1,y2\n" : "x,u,v\n");
  for (const auto& d : draws) {
    if (with_y) write_row(out, {d.x, d.u, d.v, from_pseudo(d.u, *ref_y1), from_pseudo(d.v, *ref_y2)});
    else write_row(out, {d.x, d.u, d.v});
  }
}

inline void write_summary_csv(const std::string& path, const SummaryStats& s) {
  auto out = open_output(path);
  out << "min,q1,median,mean,q3,max\n";
  out << detail::format_double(s.min) << ',' << detail::format_double(s.q1) << ','
      << detail::format_double(s.median) << ',' << detail::format_double(s.mean) << ','
      << detail::format_double(s.q3) << ',' << detail::format_double(s.max) << '\n';
}

}  // namespace bnpcc

#endif  // BNPCC_IO_HPP
