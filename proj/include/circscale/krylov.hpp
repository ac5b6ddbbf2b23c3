//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <string_view>

#include "circscale/ops.hpp"

namespace circscale {

struct CGConfig {
  double rtol = 1e-3;
  // 0 selects the number of free variables.
  Index maxiter = 0;
  std::optional<double> radius;
};

enum class CGStatus {
  Converged,
  MaxIter,
  BoundaryHit,
  NegativeCurvature,
  NumericalFailure,
};

std::string_view to_string(CGStatus s);

struct CGOutcome {
  // Full-length step, zero on fixed coordinates.
  Vec step;
  Index iterations = 0;
  CGStatus status = CGStatus::Converged;
};

/**
 * @brief Preconditioned CG for min 1/2 p^T B_FF p + p^T g_F on the free face.
 *
 * The preconditioner, when given, is applied as P_FF through scatter and
 * gather, i.e. the scaled residual P_FF r generates each new direction.
 * With a radius, the trust-region constraint is |origin + p| <= radius with
 * origin a full-length offset (zero when absent); crossing it returns the
 * boundary point along the current direction. Nonpositive curvature returns
 * the boundary point along that direction, or the current iterate when no
 * radius is set.
 */
CGOutcome cg_face(const LinOp &b, const Vec &g, const FaceMask &mask,
                  const LinOp *precond, const CGConfig &cfg,
                  const Vec *origin = nullptr);

}  // namespace circscale
