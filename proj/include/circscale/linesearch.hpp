//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <limits>
#include <optional>

#include "circscale/model.hpp"
#include "circscale/ops.hpp"

namespace circscale {

/// Componentwise max(x, 0). Negative zeros are normalized to +0.
Vec project(const Vec &x);

/// |x - Proj(x - g)|, the first-order optimality residual.
double pg_norm(const Vec &x, const Vec &g);

/// Face whose fixed coordinates are the binding set {x_i = 0, g_i > 0}.
FaceMask binding_face(const Vec &x, const Vec &g);

/// Face fixing {x_i = 0 and g_i > 0} evaluated at the Cauchy point.
FaceMask active_face(const Vec &xc, const Vec &g);

/// Largest alpha with x + alpha d >= 0 (infinity if no d_i < 0).
double max_feasible_step(const Vec &x, const Vec &d);

/**
 * @brief Quadratic model m(y) = f + g^T (y - x) + 1/2 (y - x)^T B (y - x)
 * about the iterate x.
 */
struct LocalModel {
  Vec x;
  double f = 0;
  Vec g;
  const LinOp *B = nullptr;

  double value(const Vec &y) const;
  Vec gradient(const Vec &y) const;
};

struct CauchyResult {
  Vec x;          // Cauchy point
  double t = 0;   // path parameter
  bool stalled = false;
  Index trials = 0;
};

/**
 * @brief First local minimizer of the model along t -> Proj(x + t d),
 * examined segment by segment between breakpoints. Coincident breakpoints
 * are processed together. Throws ConfigError if g^T d >= 0 with d != 0.
 */
CauchyResult cauchy_exact(const LocalModel &m, const Vec &d);

struct CauchyParams {
  double mu0 = 0.01;
  double beta = 0.5;
  Index max_backtracks = 60;
  std::optional<double> radius;
};

/**
 * @brief Inexact Cauchy point: backtracks t = t0, t0 beta, ... until
 *   m(Proj(x + t d)) <= f + mu0 g^T (Proj(x + t d) - x)
 * (and |Proj(x + t d) - x| <= radius when set). If t0 is accepted outright,
 * extrapolates by 1/beta while the condition holds and the model keeps
 * decreasing. Exhausted backtracks or a zero step yield x with stalled set.
 */
CauchyResult cauchy_backtrack(const LocalModel &m, const Vec &d, double t0,
                              const CauchyParams &p = {});

struct SearchResult {
  Vec x;
  double t = 0;
  bool stalled = false;
  // True when the accepted point was clamped by the projection.
  bool clamped = false;
};

/**
 * @brief Projected search from a minor iterate xj along w:
 * backtracks t from 1 until
 *   m(Proj(xj + t w)) - m(xj) <= mu0 grad_m(xj)^T (Proj(xj + t w) - xj).
 */
SearchResult projected_search(const LocalModel &m, const Vec &xj,
                              const Vec &grad_mj, const Vec &w,
                              const CauchyParams &p = {});

enum class WolfeStatus { Satisfied, Capped, Budget, Stalled };

struct WolfeResult {
  double alpha = 0;
  Vec x;
  double f = 0;
  Vec g;
  Index evals = 0;
  WolfeStatus status = WolfeStatus::Satisfied;
};

struct WolfeParams {
  double mu = 1e-4;
  double eta = 0.9;
  Index max_evals = 40;
  double alpha_init = 1.0;
};

/**
 * @brief Strong Wolfe search along x + alpha d, alpha capped at the largest
 * feasible step. Returns a step satisfying
 *   f(x + alpha d) <= f + mu alpha g^T d,  |g(x + alpha d)^T d| <= eta |g^T d|
 * or, when the cap is reached first, the cap with sufficient decrease only.
 * On an exhausted budget the best sufficient-decrease step is returned
 * (zero step when none was found). Requires g^T d < 0.
 */
WolfeResult strong_wolfe(const Objective &obj, const Vec &x, double f,
                         const Vec &g, const Vec &d,
                         const WolfeParams &p = {});

}  // namespace circscale
