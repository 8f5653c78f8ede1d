#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "corona/grid.hpp"
#include "corona/polynomial.hpp"

namespace corona {

inline constexpr const char* kFieldCsvHeader = "i,k,r,theta,re,im";

/// CSV dump: header i,k,r,theta,re,im; rows i-major then k; 17 significant digits; LF endings.
inline void write_field_csv(std::ostream& os, const ScalarField& u) {
  const PolarGrid& g = u.grid();
  os << kFieldCsvHeader << '\n';
  for (int i = 0; i < g.n_r(); ++i)
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx v = u(i, k);
      os << i << ',' << k << ',' << format_real(g.radius(i)) << ',' << format_real(g.angle(k)) << ','
         << format_real(v.real()) << ',' << format_real(v.imag()) << '\n';
    }
}

inline void write_field_csv(const std::string& path, const ScalarField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CoronaError("cannot open " + path + " for writing");
  write_field_csv(os, u);
  if (!os) throw CoronaError("write failed: " + path);
}

namespace detail {

inline double parse_csv_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CoronaError(where + ": bad number '" + tok + "'");
  return v;
}

inline int parse_csv_int(const std::string& tok, const std::string& where) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CoronaError(where + ": bad index '" + tok + "'");
  return v;
}

}  // namespace detail

/**
 * Reads a field dump. The grid is inferred from the largest indices and the
 * rows must then cover it exactly in dump order. Errors name the source and
 * the 1-based line number.
 */
inline ScalarField read_field_csv(std::istream& is, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) throw CoronaError(source + ": line 1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFieldCsvHeader) throw CoronaError(source + ": line 1: expected header " + kFieldCsvHeader);

  struct Row {
    int i, k;
    cplx v;
  };
  std::vector<Row> rows;
  int line_no = 1;
  int max_i = -1, max_k = -1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ": line " + std::to_string(line_no);
    std::vector<std::string> tok;
    std::stringstream ss(line);
    std::string t;
    while (std::getline(ss, t, ',')) tok.push_back(t);
    if (tok.size() != 6) throw CoronaError(where + ": expected 6 columns, got " + std::to_string(tok.size()));
    Row r{detail::parse_csv_int(tok[0], where), detail::parse_csv_int(tok[1], where),
          {detail::parse_csv_double(tok[4], where), detail::parse_csv_double(tok[5], where)}};
    if (r.i < 0 || r.k < 0) throw CoronaError(where + ": negative node index");
    max_i = std::max(max_i, r.i);
    max_k = std::max(max_k, r.k);
    rows.push_back(r);
  }
  if (rows.empty()) throw CoronaError(source + ": line " + std::to_string(line_no + 1) + ": no data rows");
  const std::size_t expected = static_cast<std::size_t>(max_i + 1) * static_cast<std::size_t>(max_k + 1);
  if (rows.size() != expected) {
    throw CoronaError(source + ": truncated at line " + std::to_string(line_no + 1) + ": expected " +
                      std::to_string(expected) + " rows for a " + std::to_string(max_i + 1) + "x" +
                      std::to_string(max_k + 1) + " grid, read " + std::to_string(rows.size()));
  }
  ScalarField u(PolarGrid(max_i + 1, max_k + 1));
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const Row& r = rows[n];
    if (u.grid().index(r.i, r.k) != n) {
      throw CoronaError(source + ": line " + std::to_string(n + 2) + ": rows out of i-major order");
    }
    u[n] = r.v;
  }
  return u;
}

inline ScalarField read_field_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CoronaError("cannot open " + path);
  return read_field_csv(is, path);
}

}  // namespace corona
