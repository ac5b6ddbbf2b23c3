//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

// Acceptance suite A1-A10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "circscale/circulant.hpp"
#include "circscale/ct.hpp"
#include "circscale/experiment.hpp"
#include "circscale/lbfgs.hpp"
#include "circscale/solvers.hpp"
#include "test_support.hpp"

namespace circscale {
namespace {

using testing::DenseQuadratic;
using testing::Rng;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict a1() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst_off = 0, worst_apply = 0;
  for (int t = 0; t < 50; ++t) {
    const Index n_b = rng.integer(2, 16);
    const Index so = rng.integer(1, 8), si = rng.integer(1, 8);
    BlockCirculantOp a = testing::random_bcop(rng, n_b, so, si);
    const Mat ad = a.dense();
    const Eigen::MatrixXcd m = testing::dense_block_dft(n_b, so) *
                               ad.cast<std::complex<double>>() *
                               testing::dense_block_dft(n_b, si).adjoint();
    double off = 0;
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j)
        if (i / so != j / si)
          off += std::norm(m(i, j));
    const double fro = std::max(ad.norm(), 1e-300);
    worst_off = std::max(worst_off, std::sqrt(off) / fro);
    const SpectralBlocks sb = block_diagonalize(a);
    for (int r = 0; r < 3; ++r) {
      const Vec x = rng.vec(a.cols());
      const Vec y = a.apply(x);
      worst_apply = std::max(worst_apply, (y - spectral_apply(sb, x)).norm() /
                                              std::max(y.norm(), 1e-300));
    }
  }
  const double secs = seconds_since(t0);
  return {worst_off <= 1e-10 && worst_apply <= 1e-10 && secs < 10,
          fmt("off-block %.1e, apply %.1e, %.2fs", worst_off, worst_apply,
              secs)};
}

Verdict a2() {
  Rng rng(1002);
  double worst_id = 0, worst_cc = 0;
  for (int t = 0; t < 100; ++t) {
    const Index n_b = rng.integer(1, 16), s = rng.integer(1, 6);
    const auto sc = testing::random_scaling(rng, n_b, s);
    const Vec x = rng.vec(n_b * s);
    worst_id = std::max(worst_id, testing::rel_err(sc->apply_P(sc->apply_Pinv(x)), x));
    const Vec px = sc->apply_P(x);
    worst_cc = std::max(worst_cc, testing::rel_err(sc->apply_C(sc->apply_C(x)), px));
  }
  int better = 0;
  const int trials = 30;
  double worst_ratio = 0;
  for (int t = 0; t < trials; ++t) {
    const Index n_b = rng.integer(2, 16), s = rng.integer(1, 4);
    // Dense blocks, so that H is not already a multiple of the identity.
    const BlockCirculantOp b = testing::random_bcop(rng, n_b, s, s, 1.0);
    const BlockCirculantOp h =
        bc_sum(1.0, bc_product(b.transpose(), b), 1e-2,
               BlockCirculantOp::identity(n_b, s));
    const ScalingOp sc = build_scaling(h);
    const Mat hd = h.dense();
    const Mat c = testing::dense_of(sc, &ScalingOp::apply_C);
    const double before = testing::cond2(hd);
    const double after = testing::cond2(c.transpose() * hd * c);
    better += after < before;
    worst_ratio = std::max(worst_ratio, after / before);
  }
  return {worst_id <= 1e-12 && worst_cc <= 1e-12 && better == trials,
          fmt("P Pinv %.1e, C C %.1e, cond improved %d/%d (worst ratio %.2e)",
              worst_id, worst_cc, better, trials, worst_ratio)};
}

Verdict a3() {
  ProblemSpec spec;
  spec.grid.n_r = 5;
  spec.grid.n_theta = 12;
  spec.n_det = 9;
  Problem p = make_problem(spec);
  const auto k = p.K;
  QuadraticModel quad(p.A, p.b, k, 0.1);
  ReconModel recon(p.A, p.b, k, 0.05, 0.3);
  Rng rng(1003);
  double worst_g = 0, worst_h = 0;
  for (const Objective *obj: {static_cast<const Objective *>(&quad),
                              static_cast<const Objective *>(&recon)}) {
    const Index n = obj->size();
    for (int t = 0; t < 20; ++t) {
      const Vec x = rng.feasible(n, 0.0);
      const Vec g = obj->gradient(x);
      Vec fd(n);
      const double h = 1e-5;
      for (Index i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        fd[i] = (obj->value(xp) - obj->value(xm)) / (2 * h);
      }
      worst_g = std::max(worst_g, testing::rel_err(fd, g));
      const Vec v = rng.vec(n);
      const double e = 1e-4;
      const Vec hv_fd =
          (obj->gradient(x + e * v) - obj->gradient(x - e * v)) / (2 * e);
      worst_h = std::max(worst_h, testing::rel_err(hv_fd, obj->hess_vec(x, v)));
    }
  }
  return {worst_g <= 1e-6 && worst_h <= 1e-5,
          fmt("gradient %.1e, hess_vec %.1e (n = %d)", worst_g, worst_h,
              int(p.A->cols()))};
}

Verdict a4() {
  Rng rng(1004);
  double worst_oracle = 0, worst_scaled = 0, worst_secant = 0;
  for (int t = 0; t < 40; ++t) {
    const bool small = t % 2 == 0;
    const Index n_b = rng.integer(1, small ? 5 : 10), s = rng.integer(1, 4);
    const Index n = n_b * s;
    const auto sc = testing::random_scaling(rng, n_b, s);
    const int m = int(rng.integer(1, 5));
    CompactLBFGS b(n, m, sc);
    CompactLBFGS plain(n, m);
    const Mat q = rng.spd(n, 1e3);
    const Mat c = testing::dense_of(*sc, &ScalingOp::apply_C);
    const Mat cinv = testing::dense_of(*sc, &ScalingOp::apply_Cinv);
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int u = 0; u < 8; ++u) {
      const Vec s_k = rng.vec(n);
      const Vec y_k = q * s_k;
      if (!b.update(s_k, y_k))
        continue;
      plain.update(cinv * s_k, c * y_k);
      pairs.emplace_back(s_k, y_k);
      worst_secant = std::max(worst_secant, testing::rel_err(b.apply(s_k), y_k));
    }
    const std::vector<std::pair<Vec, Vec>> kept(
        pairs.end() - std::min<std::ptrdiff_t>(m, pairs.size()), pairs.end());
    const Mat pinv = testing::dense_of(*sc, &ScalingOp::apply_Pinv);
    const Mat dense = testing::dense_bfgs(b.theta() * pinv, kept);
    const Mat compact = to_dense(CompactLBFGSOp(b));
    worst_oracle = std::max(worst_oracle, (compact - dense).norm() / dense.norm());
    if (n <= 20) {
      const Mat bs = c.transpose() * compact * c;
      const Mat bp = to_dense(CompactLBFGSOp(plain));
      worst_scaled = std::max(worst_scaled, (bs - bp).norm() / bp.norm());
    }
  }
  return {worst_oracle <= 1e-10 && worst_scaled <= 1e-8 && worst_secant <= 1e-9,
          fmt("dense BFGS %.1e, C^T B C %.1e, secant %.1e", worst_oracle,
              worst_scaled, worst_secant)};
}

using SolveFn = SolverResult (*)(const Objective &, const Vec &,
                                 const SolverConfig &);
const SolveFn kSolvers[] = {&solve_lbfgsb, &solve_tron, &solve_spg};

struct Instance {
  DenseQuadratic f;
  Vec x0;
  Index n_b, s;
};

Instance random_instance(Rng &rng) {
  const Index n = rng.integer(1, 12);
  DenseQuadratic f = testing::random_bound_quadratic(rng, n, 50.0);
  auto [n_b, s] = testing::random_blocking(rng, n);
  return {std::move(f), rng.feasible(n), n_b, s};
}

Verdict a5() {
  const auto t0 = Clock::now();
  Rng rng(1005);
  double worst = 0;
  int fails = 0;
  for (int t = 0; t < 100; ++t) {
    Instance in = random_instance(rng);
    const Vec xstar = testing::enumerate_active_sets(in.f.Q(), in.f.c());
    const auto sc = testing::random_scaling(rng, in.n_b, in.s);
    for (SolveFn fn: kSolvers)
      for (bool scaled: {false, true}) {
        SolverConfig cfg;
        cfg.pg_rtol = 1e-13;
        cfg.max_iter = 5000;
        cfg.cg.rtol = 1e-6;
        cfg.scaled = scaled;
        cfg.scaling = sc;
        const double err = (fn(in.f, in.x0, cfg).x - xstar).norm();
        worst = std::max(worst, err);
        fails += !(err <= 1e-8);
      }
  }
  const double secs = seconds_since(t0);
  return {fails == 0 && secs < 60,
          fmt("600 solves, %d off by > 1e-8, worst %.1e, %.2fs", fails, worst,
              secs)};
}

Verdict a6() {
  Rng rng(1006);
  int ok = 0, trials = 0;
  while (trials < 200) {
    const Index n = rng.integer(2, 12);
    const Mat p = rng.spd(n, rng.uniform(1, 1e3));
    const Mat q = rng.spd(n, rng.uniform(1, 1e3));
    Vec x = rng.feasible(n);
    x[rng.integer(0, n - 1)] = 0;
    // Gradient chosen first; positive on at least one zero coordinate.
    Vec g = rng.vec(n);
    for (Index i = 0; i < n; ++i)
      if (x[i] == 0 && rng.coin(0.7))
        g[i] = std::abs(g[i]) + 0.1;
    const FaceMask face = binding_face(x, g);
    if (face.num_free() == n)
      continue;
    DenseQuadratic f(q, g - q * x);
    const Vec d = masked_scaled_direction(DenseOp(p), f.gradient(x), face);
    if (d.norm() == 0)
      continue;
    ++trials;
    ok += f.value(project(x + 1e-8 * d)) < f.value(x);
  }
  return {ok == trials, fmt("%d/%d trials decrease at alpha = 1e-8", ok, trials)};
}

ProblemSpec desk_quadratic() {
  ProblemSpec spec;
  spec.kind = ProblemKind::Quadratic;
  spec.grid.n_r = 32;
  spec.grid.n_theta = 64;
  spec.n_det = 48;
  spec.lambda = 1e-2;
  return spec;
}

ProblemSpec desk_recon() {
  ProblemSpec spec = desk_quadratic();
  spec.kind = ProblemKind::Recon;
  spec.lambda = 1e-4;
  spec.delta = 1e-1;
  return spec;
}

ExperimentConfig experiment(const ProblemSpec &spec, SolverName solver,
                            bool scaled) {
  ExperimentConfig c;
  c.problem = spec;
  c.solver = solver;
  c.solver_cfg.scaled = scaled;
  return c;
}

Verdict a7() {
  const auto t0 = Clock::now();
  const Problem p = make_problem(desk_quadratic());
  Index cg[2];
  double ratio[2];
  for (bool scaled: {false, true}) {
    ExperimentConfig c = experiment(p.spec, SolverName::Tron, scaled);
    c.solver_cfg.pg_rtol = 1e-6;
    c.solver_cfg.max_iter = 200;
    const SolverResult r = run_solver(c, p);
    cg[scaled] = r.status == SolverStatus::Converged ? r.cg_total : -1;
    ratio[scaled] = r.trace.pg_ratio();
  }
  const double secs = seconds_since(t0);
  const double share = double(cg[1]) / double(cg[0]);
  return {cg[0] > 0 && cg[1] > 0 && share <= 0.2 && secs < 120,
          fmt("CG scaled %td vs unscaled %td (%.0f%%, need <= 20%%), "
              "pg_ratio %.1e / %.1e, %.1fs",
              cg[1], cg[0], 100 * share, ratio[1], ratio[0], secs)};
}

struct ReconRuns {
  SolverResult tron, spg;
  Problem problem;
};

const ReconRuns &recon_runs() {
  static const ReconRuns runs = [] {
    ReconRuns r{{}, {}, make_problem(desk_recon())};
    ExperimentConfig t = experiment(r.problem.spec, SolverName::Tron, true);
    t.solver_cfg.max_iter = 100;
    t.solver_cfg.pg_rtol = 1e-7;
    t.solver_cfg.cg.rtol = 1e-2;
    r.tron = run_solver(t, r.problem);
    ExperimentConfig s = experiment(r.problem.spec, SolverName::Spg, true);
    s.solver_cfg.max_iter = 100;
    s.solver_cfg.pg_rtol = 0;
    r.spg = run_solver(s, r.problem);
    return r;
  }();
  return runs;
}

Verdict a8() {
  const ReconRuns &r = recon_runs();
  const auto support = r.problem.supported();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i]) {
      num += std::pow(r.tron.x[i] - r.problem.x_true[i], 2);
      den += std::pow(r.problem.x_true[i], 2);
    }
  const double err = std::sqrt(num / den);
  const double ratio = r.tron.trace.pg_ratio();
  const bool nonneg = (r.tron.x.array() >= 0).all();
  return {ratio <= 1e-7 && r.tron.iterations <= 100 && nonneg && err <= 0.1,
          fmt("pg_ratio %.1e in %td iterations, nonnegative %s, "
              "image error %.1f%%",
              ratio, r.tron.iterations, nonneg ? "yes" : "no", 100 * err)};
}

Verdict a9() {
  const ReconRuns &r = recon_runs();
  const double tron = r.tron.trace.pg_ratio(), spg = r.spg.trace.pg_ratio();
  return {100 * tron <= spg && r.spg.iterations == 100,
          fmt("TRON %.1e vs SPG %.1e after %td iterations (factor %.1e)", tron,
              spg, r.spg.iterations, spg / tron)};
}

Verdict a10() {
  Rng rng(1010);
  int same = 0, runs = 0;
  for (int t = 0; t < 10; ++t) {
    Instance in = random_instance(rng);
    for (SolveFn fn: kSolvers) {
      SolverConfig base;
      base.pg_rtol = 1e-12;
      base.max_iter = 200;
      base.record_iterates = true;
      base.lbfgsb_cauchy = CauchyMode::Backtrack;
      base.lbfgsb_subspace = SubspaceMode::Cg;
      SolverConfig id = base;
      id.scaled = true;
      id.scaling = std::make_shared<const ScalingOp>(ScalingOp::identity(in.n_b, in.s));
      const SolverResult a = fn(in.f, in.x0, base), b = fn(in.f, in.x0, id);
      bool eq = a.iterates.size() == b.iterates.size() && a.cg_total == b.cg_total;
      for (std::size_t k = 0; eq && k < a.iterates.size(); ++k)
        eq = a.iterates[k] == b.iterates[k];
      same += eq;
      ++runs;
    }
  }
  return {same == runs, fmt("%d/%d runs bitwise identical", same, runs)};
}

}  // namespace
}  // namespace circscale

int main() {
  using namespace circscale;
  const std::pair<const char *, std::function<Verdict()>> criteria[] = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10},
  };
  int failed = 0;
  for (const auto &[name, fn]: criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
