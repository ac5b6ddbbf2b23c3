//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "circscale/ops.hpp"

namespace circscale {

struct TraceRow {
  Index iter = 0;
  double f = 0;
  double pg_norm = 0;
  Index cg_cum = 0;
  double time_s = 0;
  std::string step_kind;
};

class SolverTrace {
public:
  static constexpr const char *kHeader =
      "iter,f,pg_norm,cg_cum,time_s,step_kind";

  void append(TraceRow row) { rows_.push_back(std::move(row)); }

  const std::vector<TraceRow> &rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const TraceRow &front() const { return rows_.front(); }
  const TraceRow &back() const { return rows_.back(); }

  /// Last over first pg_norm; 0 for an already optimal start.
  double pg_ratio() const;

  void write_csv(std::ostream &os) const;
  void write_csv(const std::string &path) const;

  static SolverTrace read_csv(std::istream &is);

private:
  std::vector<TraceRow> rows_;
};

std::string format_row(const TraceRow &row);

/// Long format: label,iter,f,pg_norm,cg_cum,time_s,step_kind.
void write_compare_csv(
    std::ostream &os,
    const std::vector<std::pair<std::string, SolverTrace>> &runs);

}  // namespace circscale
