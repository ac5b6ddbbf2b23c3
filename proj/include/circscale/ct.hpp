//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "circscale/circulant.hpp"
#include "circscale/model.hpp"

namespace circscale {

/**
 * @brief Polar image grid: n_r rings of equal width over [0, r_max] and
 * n_theta equal angular sectors.
 *
 * Pixel (ring i, sector j) is stored at j * n_r + i, so the angular sector is
 * the block index and a rotation by one sector is a block shift.
 */
struct PolarGrid {
  Index n_r = 32;
  Index n_theta = 64;
  double r_max = 1.0;

  Index size() const { return n_r * n_theta; }
  Index index(Index ring, Index sector) const { return sector * n_r + ring; }
  double dr() const { return r_max / static_cast<double>(n_r); }
  double dtheta() const;
};

/// Clinical reference dimensions (226 rings, 1160 sectors, 672 bins).
struct ClinicalScale {
  static constexpr Index n_r = 226;
  static constexpr Index n_theta = 1160;
  static constexpr Index n_det = 672;
  static constexpr Index rows = n_det * n_theta;
  static constexpr Index cols = n_r * n_theta;
};

/**
 * @brief Parallel-beam projector over n_det detector bins spanning
 * [-r_max, r_max], one view per angular sector.
 *
 * Only view 0 is computed: entry (bin d, pixel) is the exact length of the
 * ray through the polar pixel. The remaining views follow from rotational
 * invariance, which makes the operator block-circulant with the sinogram
 * laid out as view * n_det + bin. Throws ConfigError if n_views != n_theta.
 */
BlockCirculantOp make_projector(const PolarGrid &grid, Index n_det,
                                Index n_views);
BlockCirculantOp make_projector(const PolarGrid &grid, Index n_det);

/// Forward differences to the next ring and the next sector (periodic).
BlockCirculantOp make_difference_operator(const PolarGrid &grid);

struct PhantomShape {
  enum class Kind { Disc, Annulus, Ellipse };

  Kind kind = Kind::Disc;
  double cx = 0, cy = 0;
  // Disc: radius in a. Annulus: outer radius a, inner radius b.
  // Ellipse: semi-axes a, b rotated by angle (radians).
  double a = 1, b = 1, angle = 0;
  double intensity = 1;
};

/// Painter's-order rasterization at pixel centers; values clamped to [0, 1].
Vec make_phantom(const PolarGrid &grid, const std::vector<PhantomShape> &shapes);
std::vector<PhantomShape> default_phantom_shapes(double r_max = 1.0);

enum class ProblemKind { Quadratic, Recon };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Quadratic;
  PolarGrid grid;
  Index n_det = 48;
  double lambda = 1e-2;
  double delta = 1e-1;
  // Standard deviation of additive Gaussian noise relative to max(b).
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

struct Problem {
  ProblemSpec spec;
  std::shared_ptr<const BlockCirculantOp> A, K;
  Vec x_true, b_clean, b, x0;
  std::shared_ptr<const Objective> model;

  // Pixels seen by at least one ray.
  std::vector<std::uint8_t> supported() const;
};

/// Assembles the data and objective for a phantom. The starting point is 0.
Problem make_problem(const ProblemSpec &spec, const Vec &phantom);
Problem make_problem(const ProblemSpec &spec);

/// Nearest-neighbor resampling onto a size x size raster over the disc.
Mat polar_to_cartesian(const PolarGrid &grid, const Vec &x, Index size);

/// P5 with maxval 65535; values divided by vmax and clamped to [0, 1].
void write_pgm16(const std::string &path, const Mat &image, double vmax);
void write_csv(const std::string &path, const Mat &table);
/// One row per view, one column per detector bin.
Mat sinogram_table(const Vec &b, Index n_det);

}  // namespace circscale
