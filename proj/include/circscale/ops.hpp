//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace circscale {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/**
 * @brief Real linear operator known only through its action.
 *
 * Operators are immutable once built. Both apply paths return freshly
 * allocated vectors, so concurrent calls on one instance are safe.
 */
class LinOp {
public:
  virtual ~LinOp() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  virtual Vec apply(const Vec &x) const = 0;
  virtual Vec apply_adjoint(const Vec &y) const = 0;

  bool square() const { return rows() == cols(); }
};

using LinOpPtr = std::shared_ptr<const LinOp>;

class DenseOp final: public LinOp {
public:
  explicit DenseOp(Mat m): m_(std::move(m)) { }

  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  Vec apply(const Vec &x) const override;
  Vec apply_adjoint(const Vec &y) const override;

  const Mat &matrix() const { return m_; }

private:
  Mat m_;
};

class DiagonalOp final: public LinOp {
public:
  explicit DiagonalOp(Vec d): d_(std::move(d)) { }

  Index rows() const override { return d_.size(); }
  Index cols() const override { return d_.size(); }
  Vec apply(const Vec &x) const override;
  Vec apply_adjoint(const Vec &y) const override { return apply(y); }

  const Vec &diagonal() const { return d_; }
  bool positive() const { return (d_.array() > 0).all(); }

private:
  Vec d_;
};

class IdentityOp final: public LinOp {
public:
  explicit IdentityOp(Index n): n_(n) { }

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Vec apply(const Vec &x) const override;
  Vec apply_adjoint(const Vec &y) const override { return apply(y); }

private:
  Index n_;
};

/// Operator defined by callbacks; used for Hessians sampled at a point.
class FunctionOp final: public LinOp {
public:
  using Fn = std::function<Vec(const Vec &)>;

  FunctionOp(Index rows, Index cols, Fn apply, Fn adjoint);
  // Self-adjoint square operator.
  FunctionOp(Index n, Fn apply);

  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  Vec apply(const Vec &x) const override;
  Vec apply_adjoint(const Vec &y) const override;

private:
  Index rows_, cols_;
  Fn apply_, adjoint_;
};

/**
 * @brief Partition of the coordinates into free and fixed indices.
 *
 * Fixed coordinates sit at their bound. gather() keeps the free entries in
 * increasing index order; scatter() is its adjoint (zeros on fixed entries).
 */
class FaceMask {
public:
  FaceMask() = default;
  explicit FaceMask(std::vector<std::uint8_t> free);

  static FaceMask all_free(Index n);
  // Free everywhere except at the listed indices.
  static FaceMask fixing(Index n, const std::vector<Index> &fixed);

  Index size() const { return static_cast<Index>(free_.size()); }
  Index num_free() const { return static_cast<Index>(free_idx_.size()); }
  bool is_free(Index i) const { return free_[i] != 0; }
  const std::vector<Index> &free_indices() const { return free_idx_; }

  Vec gather(const Vec &full) const;
  Vec scatter(const Vec &reduced) const;
  // Zeroes fixed entries in place of a full-length vector.
  Vec mask(const Vec &full) const;

  bool operator==(const FaceMask &other) const = default;

private:
  std::vector<std::uint8_t> free_;
  std::vector<Index> free_idx_;
};

/// Right-to-left product of ops: compose({A, B}) applies B first.
LinOpPtr compose(std::vector<LinOpPtr> ops);

/// Principal submatrix M_FF realized by scatter, apply, gather.
LinOpPtr restrict(LinOpPtr op, const FaceMask &mask);

/**
 * @brief d = -Pbar g where Pbar zeroes the rows and columns of P indexed by
 * the binding set; equivalently d_F = -P_FF g_F and d_G = 0.
 */
Vec masked_scaled_direction(const LinOp &P, const Vec &g,
                            const std::vector<Index> &binding);
Vec masked_scaled_direction(const LinOp &P, const Vec &g,
                            const FaceMask &face);

/// Dense materialization column by column. Test and audit helper.
Mat to_dense(const LinOp &op);

}  // namespace circscale
