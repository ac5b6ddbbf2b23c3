//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/ops.hpp"

#include <string>
#include <utility>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  void check_len(const Vec &x, Index n, const char *what) {
    if (x.size() != n)
      throw ConfigError(std::string(what) + ": expected length "
                        + std::to_string(n) + ", got "
                        + std::to_string(x.size()));
  }

  class ComposedOp final: public LinOp {
  public:
    explicit ComposedOp(std::vector<LinOpPtr> ops): ops_(std::move(ops)) { }

    Index rows() const override { return ops_.front()->rows(); }
    Index cols() const override { return ops_.back()->cols(); }

    Vec apply(const Vec &x) const override {
      check_len(x, cols(), "compose apply");
      Vec y = x;
      for (auto it = ops_.rbegin(); it != ops_.rend(); ++it)
        y = (*it)->apply(y);
      return y;
    }

    Vec apply_adjoint(const Vec &y) const override {
      check_len(y, rows(), "compose adjoint");
      Vec x = y;
      for (const auto &op: ops_)
        x = op->apply_adjoint(x);
      return x;
    }

  private:
    std::vector<LinOpPtr> ops_;
  };

  class RestrictedOp final: public LinOp {
  public:
    RestrictedOp(LinOpPtr op, FaceMask mask)
        : op_(std::move(op)), mask_(std::move(mask)) { }

    Index rows() const override { return mask_.num_free(); }
    Index cols() const override { return mask_.num_free(); }

    Vec apply(const Vec &x) const override {
      check_len(x, cols(), "restrict apply");
      return mask_.gather(op_->apply(mask_.scatter(x)));
    }

    Vec apply_adjoint(const Vec &y) const override {
      check_len(y, rows(), "restrict adjoint");
      return mask_.gather(op_->apply_adjoint(mask_.scatter(y)));
    }

  private:
    LinOpPtr op_;
    FaceMask mask_;
  };
}  // namespace

Vec DenseOp::apply(const Vec &x) const {
  check_len(x, cols(), "dense apply");
  return m_ * x;
}

Vec DenseOp::apply_adjoint(const Vec &y) const {
  check_len(y, rows(), "dense adjoint");
  return m_.transpose() * y;
}

Vec DiagonalOp::apply(const Vec &x) const {
  check_len(x, cols(), "diagonal apply");
  return d_.cwiseProduct(x);
}

Vec IdentityOp::apply(const Vec &x) const {
  check_len(x, n_, "identity apply");
  return x;
}

FunctionOp::FunctionOp(Index rows, Index cols, Fn apply, Fn adjoint)
    : rows_(rows), cols_(cols), apply_(std::move(apply)),
      adjoint_(std::move(adjoint)) { }

FunctionOp::FunctionOp(Index n, Fn apply)
    : rows_(n), cols_(n), apply_(apply), adjoint_(std::move(apply)) { }

Vec FunctionOp::apply(const Vec &x) const {
  check_len(x, cols_, "function apply");
  return apply_(x);
}

Vec FunctionOp::apply_adjoint(const Vec &y) const {
  check_len(y, rows_, "function adjoint");
  return adjoint_(y);
}

FaceMask::FaceMask(std::vector<std::uint8_t> free): free_(std::move(free)) {
  free_idx_.reserve(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i)
    if (free_[i] != 0)
      free_idx_.push_back(static_cast<Index>(i));
}

FaceMask FaceMask::all_free(Index n) {
  return FaceMask(std::vector<std::uint8_t>(n, 1));
}

FaceMask FaceMask::fixing(Index n, const std::vector<Index> &fixed) {
  std::vector<std::uint8_t> free(n, 1);
  for (Index i: fixed) {
    if (i < 0 || i >= n)
      throw ConfigError("face index out of range");
    free[i] = 0;
  }
  return FaceMask(std::move(free));
}

Vec FaceMask::gather(const Vec &full) const {
  check_len(full, size(), "gather");
  Vec out(num_free());
  for (Index k = 0; k < num_free(); ++k)
    out[k] = full[free_idx_[k]];
  return out;
}

Vec FaceMask::scatter(const Vec &reduced) const {
  check_len(reduced, num_free(), "scatter");
  Vec out = Vec::Zero(size());
  for (Index k = 0; k < num_free(); ++k)
    out[free_idx_[k]] = reduced[k];
  return out;
}

Vec FaceMask::mask(const Vec &full) const {
  check_len(full, size(), "mask");
  Vec out = Vec::Zero(size());
  for (Index i: free_idx_)
    out[i] = full[i];
  return out;
}

LinOpPtr compose(std::vector<LinOpPtr> ops) {
  if (ops.empty())
    throw ConfigError("compose: empty operator list");
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    if (ops[i]->cols() != ops[i + 1]->rows())
      throw ConfigError("compose: dimension mismatch between operators "
                        + std::to_string(i) + " and " + std::to_string(i + 1));
  }
  return std::make_shared<ComposedOp>(std::move(ops));
}

LinOpPtr restrict(LinOpPtr op, const FaceMask &mask) {
  if (!op->square() || op->rows() != mask.size())
    throw ConfigError("restrict: operator must be square with mask length");
  return std::make_shared<RestrictedOp>(std::move(op), mask);
}

Vec masked_scaled_direction(const LinOp &P, const Vec &g,
                            const FaceMask &face) {
  check_len(g, P.cols(), "masked_scaled_direction");
  if (face.num_free() == face.size())
    return -P.apply(g);
  return -face.mask(P.apply(face.mask(g)));
}

Vec masked_scaled_direction(const LinOp &P, const Vec &g,
                            const std::vector<Index> &binding) {
  return masked_scaled_direction(P, g, FaceMask::fixing(g.size(), binding));
}

Mat to_dense(const LinOp &op) {
  Mat m(op.rows(), op.cols());
  Vec e = Vec::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    m.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return m;
}

}  // namespace circscale
