//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "circscale/krylov.hpp"
#include "circscale/linesearch.hpp"
#include "circscale/model.hpp"
#include "circscale/scaling.hpp"
#include "circscale/trace.hpp"

namespace circscale {

struct TrustRegionParams {
  // Unset selects |grad f(x0)|.
  std::optional<double> delta0;
  double eta0 = 1e-3;
  double eta1 = 0.25;
  double eta2 = 0.75;
  double sigma1 = 0.25;
  double sigma2 = 0.5;
  double sigma3 = 4.0;
  // Cap on minor iterates per outer iteration; 0 selects n.
  Index max_minor = 0;
};

struct SpgParams {
  double alpha_min = 1e-30;
  double alpha_max = 1e30;
  int memory = 10;
  double gamma = 1e-4;
  double beta = 0.5;
  Index max_backtracks = 60;
};

enum class CauchyMode { Exact, Backtrack };
enum class SubspaceMode { Smw, Cg };

struct SolverConfig {
  Index max_iter = 500;
  double pg_rtol = 1e-5;
  CGConfig cg;
  CauchyParams cauchy;
  WolfeParams wolfe;
  TrustRegionParams tr;
  SpgParams spg;
  int lbfgs_memory = 5;

  bool scaled = false;
  // Required when scaled.
  std::shared_ptr<const ScalingOp> scaling;

  // L-BFGS-B only. Unset follows the path: backtracking Cauchy and
  // preconditioned CG when scaled, exact Cauchy and SMW otherwise.
  std::optional<CauchyMode> lbfgsb_cauchy;
  std::optional<SubspaceMode> lbfgsb_subspace;

  // Wall-clock budget in seconds; 0 disables it.
  double max_time_s = 0;
  bool record_iterates = false;

  /// Throws ConfigError on out-of-range parameters.
  void validate(Index n) const;
};

enum class SolverStatus { Converged, Stalled, Budget };

std::string_view to_string(SolverStatus s);

struct SolverResult {
  Vec x;
  double f = 0;
  Vec g;
  SolverTrace trace;
  SolverStatus status = SolverStatus::Budget;
  Index iterations = 0;
  Index cg_total = 0;
  // x after every outer iteration, x0 first; filled on request.
  std::vector<Vec> iterates;
};

SolverResult solve_lbfgsb(const Objective &obj, const Vec &x0,
                          const SolverConfig &cfg);
SolverResult solve_tron(const Objective &obj, const Vec &x0,
                        const SolverConfig &cfg);
SolverResult solve_spg(const Objective &obj, const Vec &x0,
                       const SolverConfig &cfg);

}  // namespace circscale
