//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/trace.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "circscale/error.hpp"

namespace circscale {

double SolverTrace::pg_ratio() const {
  if (rows_.empty())
    throw OperatorStateError("pg_ratio of an empty trace");
  if (rows_.front().pg_norm == 0)
    return 0.0;
  return rows_.back().pg_norm / rows_.front().pg_norm;
}

std::string format_row(const TraceRow &row) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%td,%.17g,%.17g,%td,%.6f,",
                static_cast<std::ptrdiff_t>(row.iter), row.f, row.pg_norm,
                static_cast<std::ptrdiff_t>(row.cg_cum), row.time_s);
  return buf + row.step_kind;
}

void SolverTrace::write_csv(std::ostream &os) const {
  os << kHeader << '\n';
  for (const auto &r: rows_)
    os << format_row(r) << '\n';
}

void SolverTrace::write_csv(const std::string &path) const {
  std::ofstream os(path);
  if (!os)
    throw ConfigError("cannot open " + path + " for writing");
  write_csv(os);
}

SolverTrace SolverTrace::read_csv(std::istream &is) {
  SolverTrace t;
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw ConfigError("trace: missing or unexpected header");
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell[6];
    for (int i = 0; i < 6; ++i)
      if (!std::getline(ss, cell[i], ',') && i < 5)
        throw ConfigError("trace: short row: " + line);
    TraceRow r;
    r.iter = std::stoll(cell[0]);
    r.f = std::stod(cell[1]);
    r.pg_norm = std::stod(cell[2]);
    r.cg_cum = std::stoll(cell[3]);
    r.time_s = std::stod(cell[4]);
    r.step_kind = cell[5];
    t.append(std::move(r));
  }
  return t;
}

void write_compare_csv(
    std::ostream &os,
    const std::vector<std::pair<std::string, SolverTrace>> &runs) {
  os << "label," << SolverTrace::kHeader << '\n';
  for (const auto &[label, trace]: runs)
    for (const auto &r: trace.rows())
      os << label << ',' << format_row(r) << '\n';
}

}  // namespace circscale
