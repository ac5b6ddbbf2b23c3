//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "circscale/error.hpp"

namespace circscale {

Vec project(const Vec &x) {
  Vec y(x.size());
  for (Index i = 0; i < x.size(); ++i)
    y[i] = x[i] > 0 ? x[i] : 0.0;
  return y;
}

double pg_norm(const Vec &x, const Vec &g) {
  return (x - project(x - g)).norm();
}

FaceMask binding_face(const Vec &x, const Vec &g) {
  std::vector<std::uint8_t> free(x.size(), 1);
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] <= 0 && g[i] > 0)
      free[i] = 0;
  return FaceMask(std::move(free));
}

FaceMask active_face(const Vec &xc, const Vec &g) {
  return binding_face(xc, g);
}

double max_feasible_step(const Vec &x, const Vec &d) {
  double cap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i)
    if (d[i] < 0)
      cap = std::min(cap, std::max(x[i], 0.0) / -d[i]);
  return cap;
}

double LocalModel::value(const Vec &y) const {
  Vec s = y - x;
  return f + g.dot(s) + 0.5 * s.dot(B->apply(s));
}

Vec LocalModel::gradient(const Vec &y) const {
  return g + B->apply(y - x);
}

namespace {

  // Change in the model, g^T s + 1/2 s^T B s.
  double model_change(const LocalModel &m, const Vec &s) {
    return m.g.dot(s) + 0.5 * s.dot(m.B->apply(s));
  }

}  // namespace

CauchyResult cauchy_exact(const LocalModel &m, const Vec &d) {
  const Index n = m.x.size();
  CauchyResult res;
  res.x = m.x;

  if (d.isZero(0)) {
    res.stalled = true;
    return res;
  }
  if (m.g.dot(d) >= 0)
    throw ConfigError("cauchy_exact: d is not a descent direction");

  // Breakpoints, ascending; coordinates with d_i >= 0 never stop.
  std::vector<std::pair<double, Index>> bp;
  for (Index i = 0; i < n; ++i)
    if (d[i] < 0)
      bp.emplace_back(std::max(m.x[i], 0.0) / -d[i], i);
  std::sort(bp.begin(), bp.end());

  Vec dir = d;
  Vec p = Vec::Zero(n);  // x(t) - x at the start of the current segment
  double t_prev = 0;
  std::size_t k = 0;

  // Coordinates already at their bound stop immediately.
  while (k < bp.size() && bp[k].first <= 0) {
    dir[bp[k].second] = 0;
    ++k;
  }

  while (true) {
    if (dir.isZero(0))
      break;
    Vec bdir = m.B->apply(dir);
    double f1 = m.g.dot(dir) + p.dot(bdir);
    double f2 = dir.dot(bdir);
    double t_next = k < bp.size() ? bp[k].first
                                  : std::numeric_limits<double>::infinity();
    double seg = t_next - t_prev;

    if (f1 >= 0) {
      res.t = t_prev;
      break;
    }
    if (f2 > 0) {
      double dt = -f1 / f2;
      if (dt < seg) {
        p += dt * dir;
        res.t = t_prev + dt;
        res.x = project(m.x + p);
        ++res.trials;
        return res;
      }
    }
    if (!std::isfinite(t_next))
      throw NumericalError("cauchy_exact: model unbounded along the path");

    p += seg * dir;
    t_prev = t_next;
    res.t = t_prev;
    ++res.trials;
    // Ties are removed together.
    while (k < bp.size() && bp[k].first <= t_next) {
      Index i = bp[k].second;
      dir[i] = 0;
      p[i] = -m.x[i];
      ++k;
    }
  }

  res.x = project(m.x + p);
  if ((res.x - m.x).isZero(0))
    res.stalled = true;
  return res;
}

CauchyResult cauchy_backtrack(const LocalModel &m, const Vec &d, double t0,
                              const CauchyParams &p) {
  CauchyResult res;
  res.x = m.x;

  auto trial = [&](double t, Vec &s, double &dq) {
    s = project(m.x + t * d) - m.x;
    ++res.trials;
    if (p.radius && s.norm() > *p.radius)
      return false;
    dq = model_change(m, s);
    return dq <= p.mu0 * m.g.dot(s);
  };

  double t = t0;
  Vec s;
  double dq = 0;
  if (trial(t, s, dq)) {
    // Extrapolate while the condition holds and the model improves.
    for (Index it = 0; it < p.max_backtracks; ++it) {
      double t_next = t / p.beta;
      Vec s_next;
      double dq_next = 0;
      if (!trial(t_next, s_next, dq_next))
        break;
      if (s_next == s || !(dq_next < dq))
        break;
      t = t_next;
      s = std::move(s_next);
      dq = dq_next;
    }
  } else {
    bool ok = false;
    for (Index it = 0; it < p.max_backtracks; ++it) {
      t *= p.beta;
      if (trial(t, s, dq)) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      res.stalled = true;
      res.t = 0;
      return res;
    }
  }

  res.t = t;
  res.x = m.x + s;
  res.x = project(res.x);
  if (s.isZero(0))
    res.stalled = true;
  return res;
}

SearchResult projected_search(const LocalModel &m, const Vec &xj,
                              const Vec &grad_mj, const Vec &w,
                              const CauchyParams &p) {
  SearchResult res;
  res.x = xj;
  double t = 1;
  for (Index it = 0; it <= p.max_backtracks; ++it) {
    Vec raw = xj + t * w;
    Vec y = project(raw);
    Vec s = y - xj;
    double dq = grad_mj.dot(s) + 0.5 * s.dot(m.B->apply(s));
    if (dq <= p.mu0 * grad_mj.dot(s)) {
      res.x = std::move(y);
      res.t = t;
      res.clamped = (raw.array() < 0).any();
      res.stalled = s.isZero(0);
      return res;
    }
    t *= p.beta;
  }
  res.stalled = true;
  return res;
}

namespace {

  struct Point {
    double a = 0, f = 0, dphi = 0;
    Vec x, g;
  };

  // Minimizer of the quadratic through (lo.f, lo.dphi) and hi.f, kept
  // inside the middle 80% of the bracket.
  double interpolate(const Point &lo, const Point &hi) {
    double h = hi.a - lo.a;
    double denom = 2 * (hi.f - lo.f - lo.dphi * h);
    double a = lo.a + 0.5 * h;
    if (denom > 0 && std::isfinite(denom))
      a = lo.a - lo.dphi * h * h / denom;
    double lo_end = std::min(lo.a, hi.a), hi_end = std::max(lo.a, hi.a);
    double margin = 0.1 * (hi_end - lo_end);
    if (!(a >= lo_end + margin && a <= hi_end - margin))
      a = 0.5 * (lo.a + hi.a);
    return a;
  }

constexpr double kWolfeNoise = 1e-12;

}  // namespace

WolfeResult strong_wolfe(const Objective &obj, const Vec &x, double f,
                         const Vec &g, const Vec &d, const WolfeParams &p) {
  const double dphi0 = g.dot(d);
  if (!(dphi0 < 0))
    throw ConfigError("strong_wolfe: d is not a descent direction");
  const double cap = max_feasible_step(x, d);

  WolfeResult res;
  res.x = x;
  res.f = f;
  res.g = g;

  auto eval = [&](double a) {
    Point pt;
    pt.a = a;
    pt.x = project(x + a * d);
    // The coordinates that define the cap land exactly on the bound.
    if (a == cap)
      for (Index i = 0; i < x.size(); ++i)
        if (d[i] < 0 && std::max(x[i], 0.0) / -d[i] == cap)
          pt.x[i] = 0;
    pt.f = obj.value_gradient(pt.x, pt.g);
    pt.dphi = pt.g.dot(d);
    ++res.evals;
    return pt;
  };
  // Near a minimizer the decrease drops below rounding in f; the
  // derivative form of the test (exact for quadratics) then takes over.
  const double f_noise = kWolfeNoise * std::abs(f);
  auto sufficient = [&](const Point &pt) {
    return pt.f <= f + p.mu * pt.a * dphi0 ||
           (pt.f <= f + f_noise && pt.dphi <= (2 * p.mu - 1) * dphi0);
  };
  // Differences below the noise level are left to the slope tests.
  auto higher = [&](const Point &a, const Point &b) {
    return a.f > b.f + f_noise || (f_noise == 0 && a.f >= b.f);
  };
  auto curvature = [&](const Point &pt) {
    return std::abs(pt.dphi) <= -p.eta * dphi0;
  };
  auto accept = [&](Point &pt, WolfeStatus st) {
    res.alpha = pt.a;
    res.x = std::move(pt.x);
    res.f = pt.f;
    res.g = std::move(pt.g);
    res.status = st;
    return res;
  };

  Point prev;
  prev.a = 0;
  prev.f = f;
  prev.dphi = dphi0;
  prev.x = x;
  prev.g = g;

  Point lo, hi;
  double a = std::min(p.alpha_init, cap);
  if (!(a > 0)) {
    res.status = WolfeStatus::Stalled;
    return res;
  }

  for (Index i = 0;; ++i) {
    if (res.evals >= p.max_evals) {
      if (prev.a > 0)
        return accept(prev, WolfeStatus::Budget);
      res.status = WolfeStatus::Stalled;
      return res;
    }
    Point cur = eval(a);
    if (!sufficient(cur) || (i > 0 && higher(cur, prev))) {
      lo = std::move(prev);
      hi = std::move(cur);
      break;
    }
    if (curvature(cur))
      return accept(cur, WolfeStatus::Satisfied);
    if (cur.dphi >= 0) {
      lo = std::move(cur);
      hi = std::move(prev);
      break;
    }
    if (a >= cap)
      return accept(cur, WolfeStatus::Capped);
    prev = std::move(cur);
    a = std::min(4 * a, cap);
  }

  // Zoom: lo satisfies sufficient decrease and has the lowest value so far.
  while (res.evals < p.max_evals) {
    double aj = interpolate(lo, hi);
    if (aj == lo.a || aj == hi.a)
      break;
    Point cur = eval(aj);
    if (!sufficient(cur) || higher(cur, lo)) {
      hi = std::move(cur);
    } else {
      if (curvature(cur))
        return accept(cur, WolfeStatus::Satisfied);
      if (cur.dphi * (hi.a - lo.a) >= 0)
        hi = std::move(lo);
      lo = std::move(cur);
    }
  }
  if (lo.a > 0)
    return accept(lo, WolfeStatus::Budget);
  res.status = WolfeStatus::Stalled;
  return res;
}

}  // namespace circscale
