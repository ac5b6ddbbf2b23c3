//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace circscale {

using CVec = Eigen::VectorXcd;

// Vectors are laid out block by block: entry (block j, coordinate c) lives
// at j * s + c. The transforms run a unitary length-n_b DFT across the
// block index independently for every coordinate c, with
//   (F x)_k = n_b^{-1/2} sum_j x_j exp(-2 pi i k j / n_b).
// Any n_b >= 1 is accepted.

CVec blockwise_dft(const Eigen::VectorXd &x, Eigen::Index n_b,
                   Eigen::Index s);
CVec blockwise_dft(const CVec &x, Eigen::Index n_b, Eigen::Index s);
CVec blockwise_idft(const CVec &x, Eigen::Index n_b, Eigen::Index s);

}  // namespace circscale
