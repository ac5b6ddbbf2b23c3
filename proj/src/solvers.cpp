//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "circscale/error.hpp"
#include "circscale/lbfgs.hpp"

namespace circscale {

std::string_view to_string(SolverStatus s) {
  switch (s) {
  case SolverStatus::Converged:
    return "converged";
  case SolverStatus::Stalled:
    return "stalled";
  case SolverStatus::Budget:
    return "budget";
  }
  return "unknown";
}

void SolverConfig::validate(Index n) const {
  if (max_iter < 0)
    throw ConfigError("max_iter must be nonnegative");
  if (!(pg_rtol >= 0 && pg_rtol < 1))
    throw ConfigError("pg_rtol must lie in [0, 1)");
  if (!(cauchy.mu0 > 0 && cauchy.mu0 < 0.5))
    throw ConfigError("cauchy mu0 must lie in (0, 1/2)");
  if (!(cauchy.beta > 0 && cauchy.beta < 1))
    throw ConfigError("cauchy beta must lie in (0, 1)");
  if (!(wolfe.mu > 0 && wolfe.mu < wolfe.eta && wolfe.eta < 1))
    throw ConfigError("wolfe parameters must satisfy 0 < mu < eta < 1");
  if (!(cg.rtol > 0 && cg.rtol < 1))
    throw ConfigError("cg rtol must lie in (0, 1)");
  if (!(tr.eta0 >= 0 && tr.eta0 < tr.eta1 && tr.eta1 < tr.eta2 &&
        tr.eta2 < 1))
    throw ConfigError("trust-region thresholds must satisfy "
                      "0 <= eta0 < eta1 < eta2 < 1");
  if (!(tr.sigma1 > 0 && tr.sigma1 <= tr.sigma2 && tr.sigma2 < 1 &&
        tr.sigma3 > 1))
    throw ConfigError("trust-region factors must satisfy "
                      "0 < sigma1 <= sigma2 < 1 < sigma3");
  if (tr.delta0 && !(*tr.delta0 > 0))
    throw ConfigError("delta0 must be positive");
  if (!(spg.alpha_min > 0 && spg.alpha_min <= spg.alpha_max))
    throw ConfigError("spg step bounds must satisfy 0 < min <= max");
  if (spg.memory < 1)
    throw ConfigError("spg memory must be at least 1");
  if (!(spg.gamma > 0 && spg.gamma < 1))
    throw ConfigError("spg gamma must lie in (0, 1)");
  if (!(spg.beta > 0 && spg.beta < 1))
    throw ConfigError("spg beta must lie in (0, 1)");
  if (lbfgs_memory < 1)
    throw ConfigError("lbfgs memory must be at least 1");
  if (scaled) {
    if (!scaling)
      throw ConfigError("scaled solver requires a scaling operator");
    if (scaling->size() != n)
      throw ConfigError("scaling size does not match the problem");
  }
}

namespace {

  using Clock = std::chrono::steady_clock;

  // Bookkeeping shared by the three solvers.
  class Run {
  public:
    Run(const Objective &obj, const Vec &x0, const SolverConfig &cfg)
        : cfg_(cfg), start_(Clock::now()) {
      if (x0.size() != obj.size())
        throw ConfigError("x0 size does not match the objective");
      cfg.validate(obj.size());
      res.x = project(x0);
      res.f = obj.value_gradient(res.x, res.g);
      pg0 = pg_norm(res.x, res.g);
      record(0, "init");
    }

    double elapsed() const {
      return std::chrono::duration<double>(Clock::now() - start_).count();
    }

    void record(Index iter, const char *kind) {
      res.iterations = iter;
      res.trace.append(
          {iter, res.f, pg_norm(res.x, res.g), res.cg_total, elapsed(), kind});
      if (cfg_.record_iterates)
        res.iterates.push_back(res.x);
    }

    bool converged() const {
      return res.trace.back().pg_norm <= cfg_.pg_rtol * pg0;
    }

    bool out_of_time() const {
      return cfg_.max_time_s > 0 && elapsed() >= cfg_.max_time_s;
    }

    // Final status when the loop ran out of iterations.
    SolverResult finish(SolverStatus st) {
      res.status = converged() ? SolverStatus::Converged : st;
      return std::move(res);
    }

    SolverResult res;
    double pg0 = 0;

  private:
    const SolverConfig &cfg_;
    Clock::time_point start_;
  };

  LinOpPtr scaling_P(const SolverConfig &cfg) {
    return cfg.scaled ? ScalingOp::P_op(cfg.scaling) : nullptr;
  }

  // -Pbar g on the scaled path, -g otherwise.
  Vec search_direction(const LinOp *P, const Vec &x, const Vec &g) {
    if (P == nullptr)
      return -g;
    return masked_scaled_direction(*P, g, binding_face(x, g));
  }

  // s^T (P_SS)^{-1} s over the support S of s, the metric in which the
  // masked direction -Pbar g is a gradient step.
  double face_metric(const LinOp *P, const SolverConfig &cfg, const Vec &s) {
    if (P == nullptr)
      return s.dot(s);
    const Index n = s.size();
    std::vector<std::uint8_t> support(n);
    for (Index i = 0; i < n; ++i)
      support[i] = s[i] != 0;
    const FaceMask face(std::move(support));
    if (face.num_free() == n)
      return s.dot(cfg.scaling->apply_Pinv(s));
    CGConfig cc;
    cc.rtol = 1e-8;
    const CGOutcome w = cg_face(*P, s, face, nullptr, cc);
    return -s.dot(w.step);
  }

}  // namespace

SolverResult solve_lbfgsb(const Objective &obj, const Vec &x0,
                          const SolverConfig &cfg) {
  Run run(obj, x0, cfg);
  SolverResult &r = run.res;
  if (run.converged())
    return run.finish(SolverStatus::Converged);

  const Index n = obj.size();
  const LinOpPtr P = scaling_P(cfg);
  const CauchyMode cmode = cfg.lbfgsb_cauchy.value_or(
      cfg.scaled ? CauchyMode::Backtrack : CauchyMode::Exact);
  const SubspaceMode smode = cfg.lbfgsb_subspace.value_or(
      cfg.scaled ? SubspaceMode::Cg : SubspaceMode::Smw);
  if (cfg.scaled && smode == SubspaceMode::Smw)
    throw ConfigError("the SMW subspace solve needs the unscaled path");

  auto fresh = [&] {
    return CompactLBFGS(n, cfg.lbfgs_memory,
                        cfg.scaled ? cfg.scaling : nullptr);
  };
  CompactLBFGS B = fresh();
  double t_warm = 1.0;
  int stalls = 0;

  for (Index k = 1; k <= cfg.max_iter; ++k) {
    if (run.out_of_time())
      return run.finish(SolverStatus::Budget);

    CompactLBFGSOp bop(B);
    LocalModel m{r.x, r.f, r.g, &bop};
    const Vec d = search_direction(P.get(), r.x, r.g);

    CauchyResult cp = cmode == CauchyMode::Exact
                          ? cauchy_exact(m, d)
                          : cauchy_backtrack(m, d, t_warm, cfg.cauchy);

    bool stalled = cp.stalled;
    if (!stalled) {
      if (cmode == CauchyMode::Backtrack)
        t_warm = cp.t;

      // Minimize the model over the face defined at the Cauchy point.
      const FaceMask face = active_face(cp.x, r.g);
      Vec xbar = cp.x;
      if (face.num_free() > 0) {
        const Vec rc = m.gradient(cp.x);
        const double rf = face.gather(rc).norm();
        if (rf > 0) {
          Vec z;
          if (smode == SubspaceMode::Smw) {
            CGConfig fb = cfg.cg;
            fb.rtol = std::min(0.1, std::sqrt(rf));
            SmwResult sr = smw_subspace_solve(B, rc, face, fb);
            r.cg_total += sr.cg_iterations;
            z = std::move(sr.step);
          } else {
            CGConfig cc = cfg.cg;
            cc.rtol = std::min(0.1, std::sqrt(rf));
            cc.radius.reset();
            CGOutcome out = cg_face(bop, rc, face, P.get(), cc);
            r.cg_total += out.iterations;
            z = std::move(out.step);
          }
          xbar += z;
        }
      }

      Vec dir = project(xbar) - r.x;
      if (!(r.g.dot(dir) < 0))
        dir = cp.x - r.x;
      if (r.g.dot(dir) < 0) {
        WolfeResult ls = strong_wolfe(obj, r.x, r.f, r.g, dir, cfg.wolfe);
        if (ls.status != WolfeStatus::Stalled) {
          const Vec s = ls.x - r.x;
          const Vec y = ls.g - r.g;
          B.update(s, y);
          r.x = std::move(ls.x);
          r.f = ls.f;
          r.g = std::move(ls.g);
          stalls = 0;
          run.record(k, ls.status == WolfeStatus::Satisfied ? "wolfe"
                        : ls.status == WolfeStatus::Capped  ? "capped"
                                                            : "budget");
          if (run.converged())
            return run.finish(SolverStatus::Converged);
          continue;
        }
      }
      stalled = true;
    }

    // No progress: drop the curvature pairs and try once more.
    if (++stalls >= 2) {
      run.record(k, "stall");
      return run.finish(SolverStatus::Stalled);
    }
    B = fresh();
    t_warm = 1.0;
    run.record(k, "restart");
  }
  return run.finish(SolverStatus::Budget);
}

SolverResult solve_tron(const Objective &obj, const Vec &x0,
                        const SolverConfig &cfg) {
  Run run(obj, x0, cfg);
  SolverResult &r = run.res;
  if (run.converged())
    return run.finish(SolverStatus::Converged);

  const Index n = obj.size();
  const LinOpPtr P = scaling_P(cfg);
  const TrustRegionParams &tr = cfg.tr;
  const Index max_minor = tr.max_minor > 0 ? tr.max_minor : n;

  const double gnorm0 = r.g.norm();
  const double delta0 = tr.delta0.value_or(gnorm0 > 0 ? gnorm0 : 1.0);
  double delta = delta0;
  double t_warm = 1.0;

  for (Index k = 1; k <= cfg.max_iter; ++k) {
    if (run.out_of_time())
      return run.finish(SolverStatus::Budget);

    const LinOpPtr H = obj.hessian(r.x);
    LocalModel m{r.x, r.f, r.g, H.get()};
    const double pg_k = pg_norm(r.x, r.g);

    CauchyParams cpar = cfg.cauchy;
    cpar.radius = delta;
    const Vec d = search_direction(P.get(), r.x, r.g);
    CauchyResult cp = cauchy_backtrack(m, d, t_warm, cpar);
    if (cp.t > 0)
      t_warm = cp.t;

    // Minor iterates on the face fixed by A, which only grows.
    Vec xj = cp.x;
    std::vector<std::uint8_t> free(n, 1);
    for (Index i = 0; i < n; ++i)
      if (xj[i] == 0 && r.g[i] > 0)
        free[i] = 0;

    for (Index j = 0; j < max_minor; ++j) {
      const Vec gm = m.gradient(xj);
      if (pg_norm(xj, gm) <= cfg.cg.rtol * pg_k)
        break;
      FaceMask face(free);
      if (face.num_free() == 0)
        break;

      CGConfig cc = cfg.cg;
      cc.radius = delta;
      const Vec origin = xj - r.x;
      CGOutcome out = cg_face(*H, gm, face, P.get(), cc, &origin);
      r.cg_total += out.iterations;
      if (out.step.isZero(0))
        break;

      SearchResult ps = projected_search(m, xj, gm, out.step, cfg.cauchy);
      if (ps.stalled)
        break;
      bool grew = false;
      for (Index i = 0; i < n; ++i)
        if (free[i] && ps.x[i] == 0 && out.step[i] < 0) {
          free[i] = 0;
          grew = true;
        }
      xj = std::move(ps.x);

      if (out.status == CGStatus::BoundaryHit ||
          out.status == CGStatus::NegativeCurvature ||
          out.status == CGStatus::NumericalFailure)
        break;
      if (out.status == CGStatus::Converged && ps.t == 1 && !ps.clamped &&
          !grew)
        break;
    }

    const Vec s = xj - r.x;
    const double snorm = s.norm();
    const double prered = -(r.g.dot(s) + 0.5 * s.dot(H->apply(s)));
    bool accepted = false;
    if (snorm > 0 && prered > 0) {
      Vec g_new;
      const double f_new = obj.value_gradient(xj, g_new);
      const double actred = r.f - f_new;
      const double rho = actred / prered;

      if (!(rho >= tr.eta0) || !std::isfinite(f_new))
        delta = tr.sigma1 * std::min(snorm, delta);
      else if (rho < tr.eta1)
        delta = tr.sigma2 * delta;
      else if (rho >= tr.eta2)
        delta = std::min(tr.sigma3 * delta, std::max(delta, tr.sigma3 * snorm));

      if (rho >= tr.eta0 && std::isfinite(f_new)) {
        r.x = std::move(xj);
        r.f = f_new;
        r.g = std::move(g_new);
        accepted = true;
      }
    } else {
      delta = tr.sigma1 * (snorm > 0 ? std::min(snorm, delta) : delta);
    }

    run.record(k, accepted ? "accept" : "reject");
    if (accepted && run.converged())
      return run.finish(SolverStatus::Converged);
    if (delta < 1e-14 * delta0)
      return run.finish(SolverStatus::Stalled);
  }
  return run.finish(SolverStatus::Budget);
}

SolverResult solve_spg(const Objective &obj, const Vec &x0,
                       const SolverConfig &cfg) {
  Run run(obj, x0, cfg);
  SolverResult &r = run.res;
  if (run.converged())
    return run.finish(SolverStatus::Converged);

  const LinOpPtr P = scaling_P(cfg);
  const SpgParams &sp = cfg.spg;
  auto clamp = [&](double a) {
    return std::clamp(a, sp.alpha_min, sp.alpha_max);
  };

  double alpha = 1.0;
  {
    const Vec d = search_direction(P.get(), r.x, r.g);
    const double step = (project(r.x + d) - r.x).lpNorm<Eigen::Infinity>();
    if (step > 0)
      alpha = clamp(1.0 / step);
  }
  std::deque<double> hist{r.f};

  for (Index k = 1; k <= cfg.max_iter; ++k) {
    if (run.out_of_time())
      return run.finish(SolverStatus::Budget);

    // With a nondiagonal scaling the projected direction is only
    // guaranteed to descend for small steps.
    const Vec dg = search_direction(P.get(), r.x, r.g);
    Vec d = project(r.x + alpha * dg) - r.x;
    double gd = r.g.dot(d);
    for (Index it = 0; !(gd < 0) && it < sp.max_backtracks; ++it) {
      alpha = std::max(alpha * sp.beta, sp.alpha_min);
      d = project(r.x + alpha * dg) - r.x;
      gd = r.g.dot(d);
    }
    if (!(gd < 0)) {
      run.record(k, "stall");
      return run.finish(SolverStatus::Stalled);
    }
    const double f_ref = *std::max_element(hist.begin(), hist.end());

    double lam = 1.0;
    bool ok = false;
    Vec x_new, g_new;
    double f_new = 0;
    for (Index it = 0; it <= sp.max_backtracks; ++it) {
      x_new = project(r.x + lam * d);
      f_new = obj.value_gradient(x_new, g_new);
      if (f_new <= f_ref + sp.gamma * lam * gd) {
        ok = true;
        break;
      }
      lam *= sp.beta;
    }
    if (!ok) {
      run.record(k, "stall");
      return run.finish(SolverStatus::Stalled);
    }

    const Vec s = x_new - r.x;
    const Vec y = g_new - r.g;
    const double sy = s.dot(y);
    if (sy > 0) {
      alpha = clamp(face_metric(P.get(), cfg, s) / sy);
    } else {
      alpha = sp.alpha_max;
    }

    r.x = std::move(x_new);
    r.f = f_new;
    r.g = std::move(g_new);
    hist.push_back(r.f);
    if (static_cast<int>(hist.size()) > sp.memory)
      hist.pop_front();

    run.record(k, lam == 1.0 ? "bb" : "backtrack");
    if (run.converged())
      return run.finish(SolverStatus::Converged);
  }
  return run.finish(SolverStatus::Budget);
}

}  // namespace circscale
