//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/ct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <utility>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0 ? t + kTwoPi : t;
  }

  Index clamp_bin(double v, Index n) {
    auto i = static_cast<Index>(std::floor(v));
    return std::clamp<Index>(i, 0, n - 1);
  }

  // Crossings of the vertical line x = u with ring circles, sector rays and
  // the outer disc boundary, sorted along y.
  std::vector<double> crossings(const PolarGrid &grid, double u) {
    const double rm = grid.r_max;
    const double ymax = std::sqrt(rm * rm - u * u);
    std::vector<double> ts { -ymax, ymax };

    for (Index i = 1; i < grid.n_r; ++i) {
      const double r = grid.dr() * static_cast<double>(i);
      if (r > std::abs(u)) {
        const double y = std::sqrt(r * r - u * u);
        ts.push_back(-y);
        ts.push_back(y);
      }
    }

    if (std::abs(u) <= 1e-15 * rm) {
      ts.push_back(0.0);
    } else if (grid.n_theta > 1) {
      for (Index b = 0; b < grid.n_theta; ++b) {
        const double th = grid.dtheta() * static_cast<double>(b);
        const double c = std::cos(th);
        if (std::abs(c) < 1e-15 || u / c <= 0)
          continue;
        const double y = u * std::tan(th);
        if (y > -ymax && y < ymax)
          ts.push_back(y);
      }
    }

    std::sort(ts.begin(), ts.end());
    return ts;
  }

  bool inside(const PhantomShape &s, double x, double y) {
    const double dx = x - s.cx, dy = y - s.cy;
    switch (s.kind) {
    case PhantomShape::Kind::Disc:
      return dx * dx + dy * dy <= s.a * s.a;
    case PhantomShape::Kind::Annulus: {
      const double r2 = dx * dx + dy * dy;
      return r2 <= s.a * s.a && r2 >= s.b * s.b;
    }
    case PhantomShape::Kind::Ellipse: {
      const double c = std::cos(s.angle), sn = std::sin(s.angle);
      const double p = dx * c + dy * sn, q = -dx * sn + dy * c;
      return (p * p) / (s.a * s.a) + (q * q) / (s.b * s.b) <= 1.0;
    }
    }
    return false;
  }
}  // namespace

double PolarGrid::dtheta() const {
  return kTwoPi / static_cast<double>(n_theta);
}

BlockCirculantOp make_projector(const PolarGrid &grid, Index n_det,
                                Index n_views) {
  if (n_views != grid.n_theta)
    throw ConfigError("make_projector: view count must equal angular sectors");
  if (grid.n_r < 1 || grid.n_theta < 1 || n_det < 1 || !(grid.r_max > 0))
    throw ConfigError("make_projector: invalid geometry");

  const double du = 2.0 * grid.r_max / static_cast<double>(n_det);
  const double drop = 1e-12 * grid.r_max;
  std::vector<std::vector<Eigen::Triplet<double>>> trips(grid.n_theta);

  for (Index d = 0; d < n_det; ++d) {
    const double u = -grid.r_max + (static_cast<double>(d) + 0.5) * du;
    if (std::abs(u) >= grid.r_max)
      continue;

    const auto ts = crossings(grid, u);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double len = ts[k + 1] - ts[k];
      if (len <= drop)
        continue;
      const double y = 0.5 * (ts[k] + ts[k + 1]);
      const Index ring = clamp_bin(std::hypot(u, y) / grid.dr(), grid.n_r);
      const Index sector =
          clamp_bin(wrap_angle(std::atan2(y, u)) / grid.dtheta(), grid.n_theta);
      trips[sector].emplace_back(d, ring, len);
    }
  }

  std::vector<SparseBlock> blocks;
  blocks.reserve(grid.n_theta);
  for (auto &t: trips) {
    SparseBlock b(n_det, grid.n_r);
    b.setFromTriplets(t.begin(), t.end());
    b.prune(drop, 1.0);
    blocks.push_back(std::move(b));
  }
  return BlockCirculantOp(n_det, grid.n_r, std::move(blocks));
}

BlockCirculantOp make_projector(const PolarGrid &grid, Index n_det) {
  return make_projector(grid, n_det, grid.n_theta);
}

BlockCirculantOp make_difference_operator(const PolarGrid &grid) {
  const Index nr = grid.n_r, nt = grid.n_theta;
  const Index radial = nr - 1;
  const Index s_out = radial + nr;

  std::vector<std::vector<Eigen::Triplet<double>>> trips(nt);
  for (Index i = 0; i < radial; ++i) {
    trips[0].emplace_back(i, i, -1.0);
    trips[0].emplace_back(i, i + 1, 1.0);
  }
  for (Index i = 0; i < nr; ++i) {
    trips[0].emplace_back(radial + i, i, -1.0);
    trips[1 % nt].emplace_back(radial + i, i, 1.0);
  }

  std::vector<SparseBlock> blocks;
  blocks.reserve(nt);
  for (auto &t: trips) {
    SparseBlock b(s_out, nr);
    b.setFromTriplets(t.begin(), t.end());
    b.prune(0.0);
    blocks.push_back(std::move(b));
  }
  return BlockCirculantOp(s_out, nr, std::move(blocks));
}

Vec make_phantom(const PolarGrid &grid,
                 const std::vector<PhantomShape> &shapes) {
  Vec x = Vec::Zero(grid.size());
  for (Index j = 0; j < grid.n_theta; ++j) {
    const double th = (static_cast<double>(j) + 0.5) * grid.dtheta();
    for (Index i = 0; i < grid.n_r; ++i) {
      const double r = (static_cast<double>(i) + 0.5) * grid.dr();
      const double px = r * std::cos(th), py = r * std::sin(th);
      for (const auto &s: shapes)
        if (inside(s, px, py))
          x[grid.index(i, j)] = std::clamp(s.intensity, 0.0, 1.0);
    }
  }
  return x;
}

std::vector<PhantomShape> default_phantom_shapes(double r_max) {
  using K = PhantomShape::Kind;
  std::vector<PhantomShape> shapes = {
    { K::Ellipse, 0.0, 0.0, 0.88, 0.72, 0.0, 0.45 },
    { K::Ellipse, 0.0, 0.0, 0.80, 0.64, 0.0, 0.30 },
    { K::Disc, 0.32, 0.18, 0.16, 0.0, 0.0, 0.90 },
    { K::Disc, -0.36, -0.12, 0.13, 0.0, 0.0, 0.0 },
    { K::Ellipse, 0.02, -0.36, 0.22, 0.09, 0.5, 0.70 },
    { K::Annulus, -0.20, 0.36, 0.13, 0.06, 0.0, 1.00 },
  };
  for (auto &sh: shapes) {
    sh.cx *= r_max;
    sh.cy *= r_max;
    sh.a *= r_max;
    sh.b *= r_max;
  }
  return shapes;
}

std::vector<std::uint8_t> Problem::supported() const {
  std::vector<std::uint8_t> seen(A->cols(), 0);
  for (Index m = 0; m < A->n_b(); ++m) {
    const auto &blk = A->block(m);
    for (Index c = 0; c < blk.outerSize(); ++c)
      for (SparseBlock::InnerIterator it(blk, c); it; ++it)
        if (it.value() > 0)
          for (Index j = 0; j < A->n_b(); ++j)
            seen[j * A->s_in() + c] = 1;
  }
  return seen;
}

Problem make_problem(const ProblemSpec &spec, const Vec &phantom) {
  if (phantom.size() != spec.grid.size())
    throw ConfigError("make_problem: phantom does not match the grid");
  if (spec.noise_sigma < 0)
    throw ConfigError("make_problem: noise level must be nonnegative");

  Problem p;
  p.spec = spec;
  p.A = std::make_shared<const BlockCirculantOp>(
      make_projector(spec.grid, spec.n_det));
  p.K = std::make_shared<const BlockCirculantOp>(
      make_difference_operator(spec.grid));
  p.x_true = phantom;
  p.b_clean = p.A->apply(phantom);
  p.b = p.b_clean;

  if (spec.noise_sigma > 0) {
    const double scale = spec.noise_sigma * p.b_clean.cwiseAbs().maxCoeff();
    std::mt19937_64 rng(spec.noise_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < p.b.size(); ++i)
      p.b[i] += scale * normal(rng);
  }
  p.x0 = Vec::Zero(spec.grid.size());

  switch (spec.kind) {
  case ProblemKind::Quadratic:
    p.model = std::make_shared<QuadraticModel>(p.A, p.b, p.K, spec.lambda);
    break;
  case ProblemKind::Recon: {
    Vec weights = (-p.b_clean.array()).exp().matrix();
    p.model = std::make_shared<ReconModel>(p.A, p.b, std::move(weights), p.K,
                                           spec.lambda, spec.delta);
    break;
  }
  }
  return p;
}

Problem make_problem(const ProblemSpec &spec) {
  return make_problem(spec, make_phantom(spec.grid, default_phantom_shapes(spec.grid.r_max)));
}

Mat polar_to_cartesian(const PolarGrid &grid, const Vec &x, Index size) {
  if (x.size() != grid.size())
    throw ConfigError("polar_to_cartesian: image does not match the grid");
  Mat img = Mat::Zero(size, size);
  const double h = 2.0 * grid.r_max / static_cast<double>(size);
  for (Index row = 0; row < size; ++row) {
    const double py = grid.r_max - (static_cast<double>(row) + 0.5) * h;
    for (Index col = 0; col < size; ++col) {
      const double px = -grid.r_max + (static_cast<double>(col) + 0.5) * h;
      const double r = std::hypot(px, py);
      if (r > grid.r_max)
        continue;
      const Index ring = clamp_bin(r / grid.dr(), grid.n_r);
      const Index sector = clamp_bin(
          wrap_angle(std::atan2(py, px)) / grid.dtheta(), grid.n_theta);
      img(row, col) = x[grid.index(ring, sector)];
    }
  }
  return img;
}

void write_pgm16(const std::string &path, const Mat &image, double vmax) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw ConfigError("cannot open " + path);
  os << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
  const double scale = vmax > 0 ? 1.0 / vmax : 0.0;
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      const double v = std::clamp(image(r, c) * scale, 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      os.put(static_cast<char>(q >> 8));
      os.put(static_cast<char>(q & 0xff));
    }
  }
}

void write_csv(const std::string &path, const Mat &table) {
  std::ofstream os(path);
  if (!os)
    throw ConfigError("cannot open " + path);
  os << std::setprecision(17);
  for (Index r = 0; r < table.rows(); ++r) {
    for (Index c = 0; c < table.cols(); ++c)
      os << (c ? "," : "") << table(r, c);
    os << '\n';
  }
}

Mat sinogram_table(const Vec &b, Index n_det) {
  if (n_det < 1 || b.size() % n_det != 0)
    throw ConfigError("sinogram_table: length is not a multiple of n_det");
  return Eigen::Map<const Mat>(b.data(), n_det, b.size() / n_det).transpose();
}

}  // namespace circscale
