//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "circscale/fft.hpp"
#include "circscale/ops.hpp"

namespace circscale {

// Compressed-column sparse block.
using SparseBlock = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/**
 * @brief Block-circulant operator stored as its first block-row.
 *
 * The full matrix has n_b x n_b blocks of size s_out x s_in, and block
 * (i, j) equals first_block_row[(j - i) mod n_b]. Products are computed in
 * the spatial domain with the sparse blocks; the spectral blocks are only
 * formed on request.
 */
class BlockCirculantOp final: public LinOp {
public:
  BlockCirculantOp(Index s_out, Index s_in,
                   std::vector<SparseBlock> first_block_row);

  static BlockCirculantOp identity(Index n_b, Index s);

  Index rows() const override { return n_b() * s_out_; }
  Index cols() const override { return n_b() * s_in_; }
  Vec apply(const Vec &x) const override;
  Vec apply_adjoint(const Vec &y) const override;

  Index n_b() const { return static_cast<Index>(blocks_.size()); }
  Index s_out() const { return s_out_; }
  Index s_in() const { return s_in_; }
  const SparseBlock &block(Index k) const { return blocks_[k]; }
  const std::vector<SparseBlock> &first_block_row() const { return blocks_; }
  Index nnz() const;

  // Block-circulant with transposed, index-reversed blocks.
  BlockCirculantOp transpose() const;
  Mat dense() const;

private:
  Index s_out_, s_in_;
  std::vector<SparseBlock> blocks_;
};

/// first block-row of X * Y.
BlockCirculantOp bc_product(const BlockCirculantOp &x,
                            const BlockCirculantOp &y);
/// alpha * X + beta * Y.
BlockCirculantOp bc_sum(double alpha, const BlockCirculantOp &x, double beta,
                        const BlockCirculantOp &y);
/// diag(w, ..., w) * A with one weight per within-block output row.
BlockCirculantOp bc_scale_rows(const BlockCirculantOp &a, const Vec &w);

/// Diagonal blocks of F A F*, one per frequency.
struct SpectralBlocks {
  Index s_out = 0, s_in = 0;
  std::vector<Eigen::MatrixXcd> blocks;

  Index n_b() const { return static_cast<Index>(blocks.size()); }
};

/// Spectral block k: sum_m A_m exp(2 pi i k m / n_b).
Eigen::MatrixXcd spectral_block(const BlockCirculantOp &a, Index k);

/// Visits the spectral blocks one at a time in increasing frequency order.
void for_each_spectral_block(
    const BlockCirculantOp &a,
    const std::function<void(Index, const Eigen::MatrixXcd &)> &fn);

SpectralBlocks block_diagonalize(const BlockCirculantOp &a);

/// Inverse of block_diagonalize: dense first block-row from spectral blocks.
std::vector<Mat> first_block_row_from_spectral(const SpectralBlocks &sb);

/// Spectral route for A x: real part of F* diag(A_k) F x.
Vec spectral_apply(const SpectralBlocks &sb, const Vec &x);

// Binary container: "BCOP", little-endian u64 n_b, s_in, s_out, then per
// block u64 nnz, u64 col_ptr[s_in + 1], u64 row_idx[nnz], f64 values[nnz].
void save_bcop(std::ostream &os, const BlockCirculantOp &a);
BlockCirculantOp load_bcop(std::istream &is);
void save_bcop(const std::string &path, const BlockCirculantOp &a);
BlockCirculantOp load_bcop(const std::string &path);

}  // namespace circscale
