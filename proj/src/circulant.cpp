//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/circulant.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <utility>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  Index wrap(Index k, Index n) {
    Index r = k % n;
    return r < 0 ? r + n : r;
  }

  void require_compatible(const BlockCirculantOp &x,
                          const BlockCirculantOp &y, const char *what) {
    if (x.n_b() != y.n_b())
      throw ConfigError(std::string(what) + ": block counts differ");
  }

  void write_u64(std::ostream &os, std::uint64_t v) {
    std::array<char, 8> buf;
    for (int i = 0; i < 8; ++i)
      buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(buf.data(), 8);
  }

  std::uint64_t read_u64(std::istream &is) {
    std::array<unsigned char, 8> buf;
    is.read(reinterpret_cast<char *>(buf.data()), 8);
    if (!is)
      throw ConfigError("bcop: truncated stream");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
      v = (v << 8) | buf[i];
    return v;
  }

  void write_f64(std::ostream &os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    write_u64(os, bits);
  }

  double read_f64(std::istream &is) {
    std::uint64_t bits = read_u64(is);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }

  constexpr std::array<char, 4> kMagic = { 'B', 'C', 'O', 'P' };
  constexpr std::uint64_t kMaxDim = std::uint64_t { 1 } << 32;
}  // namespace

BlockCirculantOp::BlockCirculantOp(Index s_out, Index s_in,
                                   std::vector<SparseBlock> first_block_row)
    : s_out_(s_out), s_in_(s_in), blocks_(std::move(first_block_row)) {
  if (blocks_.empty() || s_out_ < 1 || s_in_ < 1)
    throw ConfigError("block-circulant: need at least one nonempty block");
  for (auto &b: blocks_) {
    if (b.rows() != s_out_ || b.cols() != s_in_)
      throw ConfigError("block-circulant: block has wrong shape");
    b.makeCompressed();
  }
}

BlockCirculantOp BlockCirculantOp::identity(Index n_b, Index s) {
  std::vector<SparseBlock> blocks(n_b, SparseBlock(s, s));
  blocks[0].setIdentity();
  return BlockCirculantOp(s, s, std::move(blocks));
}

Index BlockCirculantOp::nnz() const {
  Index total = 0;
  for (const auto &b: blocks_)
    total += b.nonZeros();
  return total;
}

Vec BlockCirculantOp::apply(const Vec &x) const {
  if (x.size() != cols())
    throw ConfigError("bc_apply: dimension mismatch");

  const Index n = n_b();
  Eigen::Map<const Mat> xm(x.data(), s_in_, n);
  Vec y = Vec::Zero(rows());
  Eigen::Map<Mat> ym(y.data(), s_out_, n);

  // Column i of ym collects B_m * x_{(i + m) mod n}.
  for (Index m = 0; m < n; ++m) {
    if (blocks_[m].nonZeros() == 0)
      continue;
    Mat z = blocks_[m] * xm;
    ym.leftCols(n - m) += z.rightCols(n - m);
    if (m > 0)
      ym.rightCols(m) += z.leftCols(m);
  }
  return y;
}

Vec BlockCirculantOp::apply_adjoint(const Vec &y) const {
  if (y.size() != rows())
    throw ConfigError("bc_adjoint: dimension mismatch");

  const Index n = n_b();
  Eigen::Map<const Mat> ym(y.data(), s_out_, n);
  Vec x = Vec::Zero(cols());
  Eigen::Map<Mat> xm(x.data(), s_in_, n);

  // Column j of xm collects B_m^T * y_{(j - m) mod n}.
  for (Index m = 0; m < n; ++m) {
    if (blocks_[m].nonZeros() == 0)
      continue;
    Mat z = blocks_[m].transpose() * ym;
    xm.rightCols(n - m) += z.leftCols(n - m);
    if (m > 0)
      xm.leftCols(m) += z.rightCols(m);
  }
  return x;
}

BlockCirculantOp BlockCirculantOp::transpose() const {
  const Index n = n_b();
  std::vector<SparseBlock> blocks(n);
  for (Index m = 0; m < n; ++m)
    blocks[m] = blocks_[wrap(-m, n)].transpose();
  return BlockCirculantOp(s_in_, s_out_, std::move(blocks));
}

Mat BlockCirculantOp::dense() const {
  const Index n = n_b();
  Mat d = Mat::Zero(rows(), cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      d.block(i * s_out_, j * s_in_, s_out_, s_in_) =
          Mat(blocks_[wrap(j - i, n)]);
  return d;
}

BlockCirculantOp bc_product(const BlockCirculantOp &x,
                            const BlockCirculantOp &y) {
  require_compatible(x, y, "bc_product");
  if (x.s_in() != y.s_out())
    throw ConfigError("bc_product: inner block sizes differ");

  const Index n = x.n_b();
  std::vector<SparseBlock> blocks(n, SparseBlock(x.s_out(), y.s_in()));
  for (Index l = 0; l < n; ++l) {
    if (x.block(l).nonZeros() == 0)
      continue;
    for (Index j = 0; j < n; ++j) {
      const auto &yb = y.block(wrap(j - l, n));
      if (yb.nonZeros() == 0)
        continue;
      blocks[j] += (x.block(l) * yb).pruned();
    }
  }
  return BlockCirculantOp(x.s_out(), y.s_in(), std::move(blocks));
}

BlockCirculantOp bc_sum(double alpha, const BlockCirculantOp &x, double beta,
                        const BlockCirculantOp &y) {
  require_compatible(x, y, "bc_sum");
  if (x.s_in() != y.s_in() || x.s_out() != y.s_out())
    throw ConfigError("bc_sum: block shapes differ");

  std::vector<SparseBlock> blocks(x.n_b());
  for (Index m = 0; m < x.n_b(); ++m)
    blocks[m] = alpha * x.block(m) + beta * y.block(m);
  return BlockCirculantOp(x.s_out(), x.s_in(), std::move(blocks));
}

BlockCirculantOp bc_scale_rows(const BlockCirculantOp &a, const Vec &w) {
  if (w.size() != a.s_out())
    throw ConfigError("bc_scale_rows: weight length must equal s_out");

  std::vector<SparseBlock> blocks(a.n_b());
  for (Index m = 0; m < a.n_b(); ++m)
    blocks[m] = w.asDiagonal() * a.block(m);
  return BlockCirculantOp(a.s_out(), a.s_in(), std::move(blocks));
}

Eigen::MatrixXcd spectral_block(const BlockCirculantOp &a, Index k) {
  const Index n = a.n_b();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.s_out(), a.s_in());
  for (Index m = 0; m < n; ++m) {
    const double angle = 2.0 * std::numbers::pi
                         * static_cast<double>(wrap(k * m, n))
                         / static_cast<double>(n);
    const std::complex<double> w(std::cos(angle), std::sin(angle));
    for (Index c = 0; c < a.block(m).outerSize(); ++c)
      for (SparseBlock::InnerIterator it(a.block(m), c); it; ++it)
        out(it.row(), it.col()) += w * it.value();
  }
  return out;
}

void for_each_spectral_block(
    const BlockCirculantOp &a,
    const std::function<void(Index, const Eigen::MatrixXcd &)> &fn) {
  for (Index k = 0; k < a.n_b(); ++k)
    fn(k, spectral_block(a, k));
}

SpectralBlocks block_diagonalize(const BlockCirculantOp &a) {
  SpectralBlocks sb;
  sb.s_out = a.s_out();
  sb.s_in = a.s_in();
  sb.blocks.reserve(a.n_b());
  for_each_spectral_block(a, [&](Index, const Eigen::MatrixXcd &blk) {
    sb.blocks.push_back(blk);
  });
  return sb;
}

std::vector<Mat> first_block_row_from_spectral(const SpectralBlocks &sb) {
  const Index n = sb.n_b();
  std::vector<Mat> out;
  out.reserve(n);
  for (Index m = 0; m < n; ++m) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(sb.s_out, sb.s_in);
    for (Index k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi
                           * static_cast<double>(wrap(k * m, n))
                           / static_cast<double>(n);
      acc += std::complex<double>(std::cos(angle), std::sin(angle))
             * sb.blocks[k];
    }
    out.push_back(acc.real() / static_cast<double>(n));
  }
  return out;
}

Vec spectral_apply(const SpectralBlocks &sb, const Vec &x) {
  const Index n = sb.n_b();
  if (x.size() != n * sb.s_in)
    throw ConfigError("spectral_apply: dimension mismatch");

  CVec xh = blockwise_dft(x, n, sb.s_in);
  CVec yh(n * sb.s_out);
  for (Index k = 0; k < n; ++k)
    yh.segment(k * sb.s_out, sb.s_out) =
        sb.blocks[k] * xh.segment(k * sb.s_in, sb.s_in);
  return blockwise_idft(yh, n, sb.s_out).real();
}

void save_bcop(std::ostream &os, const BlockCirculantOp &a) {
  os.write(kMagic.data(), kMagic.size());
  write_u64(os, a.n_b());
  write_u64(os, a.s_in());
  write_u64(os, a.s_out());
  for (const auto &b: a.first_block_row()) {
    write_u64(os, b.nonZeros());
    for (Index c = 0; c <= b.cols(); ++c)
      write_u64(os, b.outerIndexPtr()[c]);
    for (Index k = 0; k < b.nonZeros(); ++k)
      write_u64(os, b.innerIndexPtr()[k]);
    for (Index k = 0; k < b.nonZeros(); ++k)
      write_f64(os, b.valuePtr()[k]);
  }
  if (!os)
    throw ConfigError("bcop: write failed");
}

BlockCirculantOp load_bcop(std::istream &is) {
  std::array<char, 4> magic {};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic)
    throw ConfigError("bcop: bad magic bytes");

  const std::uint64_t n_b = read_u64(is), s_in = read_u64(is),
                      s_out = read_u64(is);
  if (n_b == 0 || s_in == 0 || s_out == 0 || n_b > kMaxDim || s_in > kMaxDim
      || s_out > kMaxDim)
    throw ConfigError("bcop: invalid header dimensions");

  std::vector<SparseBlock> blocks;
  blocks.reserve(n_b);
  for (std::uint64_t m = 0; m < n_b; ++m) {
    const std::uint64_t nnz = read_u64(is);
    if (nnz > s_in * s_out)
      throw ConfigError("bcop: block nnz exceeds block size");
    std::vector<std::uint64_t> colptr(s_in + 1), rowidx(nnz);
    for (auto &v: colptr)
      v = read_u64(is);
    for (auto &v: rowidx)
      v = read_u64(is);
    if (colptr.front() != 0 || colptr.back() != nnz)
      throw ConfigError("bcop: inconsistent column pointers");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(nnz);
    for (std::uint64_t c = 0; c < s_in; ++c) {
      if (colptr[c] > colptr[c + 1])
        throw ConfigError("bcop: decreasing column pointers");
      for (std::uint64_t k = colptr[c]; k < colptr[c + 1]; ++k) {
        if (rowidx[k] >= s_out)
          throw ConfigError("bcop: row index out of range");
        trips.emplace_back(static_cast<Index>(rowidx[k]),
                           static_cast<Index>(c), 0.0);
      }
    }
    for (auto &t: trips)
      t = Eigen::Triplet<double>(t.row(), t.col(), read_f64(is));

    SparseBlock b(static_cast<Index>(s_out), static_cast<Index>(s_in));
    b.setFromTriplets(trips.begin(), trips.end());
    blocks.push_back(std::move(b));
  }
  return BlockCirculantOp(static_cast<Index>(s_out),
                          static_cast<Index>(s_in), std::move(blocks));
}

void save_bcop(const std::string &path, const BlockCirculantOp &a) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw ConfigError("bcop: cannot open " + path);
  save_bcop(os, a);
}

BlockCirculantOp load_bcop(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw ConfigError("bcop: cannot open " + path);
  return load_bcop(is);
}

}  // namespace circscale
