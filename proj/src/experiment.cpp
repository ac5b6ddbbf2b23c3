//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "circscale/error.hpp"
#include "circscale/scaling.hpp"

namespace circscale {

namespace fs = std::filesystem;

std::string_view to_string(SolverName s) {
  switch (s) {
  case SolverName::Lbfgsb:
    return "lbfgsb";
  case SolverName::Tron:
    return "tron";
  case SolverName::Spg:
    return "spg";
  }
  return "unknown";
}

int exit_code(SolverStatus s) {
  return s == SolverStatus::Converged ? 0 : 2;
}

namespace {

  std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
      return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  }

  // Strips an unquoted trailing comment.
  std::string strip_comment(const std::string &s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"')
        quoted = !quoted;
      else if (s[i] == '#' && !quoted)
        return s.substr(0, i);
    }
    return s;
  }

  struct Value {
    std::string text;

    double number() const {
      double v = 0;
      const char *b = text.data(), *e = b + text.size();
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e)
        throw ConfigError("expected a number, got '" + text + "'");
      return v;
    }

    Index integer() const {
      long long v = 0;
      const char *b = text.data(), *e = b + text.size();
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e)
        throw ConfigError("expected an integer, got '" + text + "'");
      return static_cast<Index>(v);
    }

    Index positive() const {
      Index v = integer();
      if (v < 1)
        throw ConfigError("expected a positive integer, got '" + text + "'");
      return v;
    }

    bool boolean() const {
      if (text == "true")
        return true;
      if (text == "false")
        return false;
      throw ConfigError("expected true or false, got '" + text + "'");
    }

    std::string string() const {
      if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
        return text.substr(1, text.size() - 2);
      return text;
    }
  };

  using Setter = std::function<void(ExperimentConfig &, const Value &)>;
  using KeyTable = std::map<std::string, Setter>;

  const std::map<std::string, KeyTable> &key_tables() {
    static const std::map<std::string, KeyTable> tables = [] {
      std::map<std::string, KeyTable> t;
      KeyTable &p = t["problem"];
      p["kind"] = [](ExperimentConfig &c, const Value &v) {
        const std::string s = v.string();
        if (s == "quadratic")
          c.problem.kind = ProblemKind::Quadratic;
        else if (s == "recon")
          c.problem.kind = ProblemKind::Recon;
        else
          throw ConfigError("kind must be quadratic or recon");
      };
      p["n_r"] = [](auto &c, auto &v) { c.problem.grid.n_r = v.positive(); };
      p["n_theta"] = [](auto &c, auto &v) {
        c.problem.grid.n_theta = v.positive();
      };
      p["r_max"] = [](auto &c, auto &v) {
        c.problem.grid.r_max = v.number();
        if (!(c.problem.grid.r_max > 0))
          throw ConfigError("r_max must be positive");
      };
      p["n_det"] = [](auto &c, auto &v) { c.problem.n_det = v.positive(); };
      p["lambda"] = [](auto &c, auto &v) { c.problem.lambda = v.number(); };
      p["delta"] = [](auto &c, auto &v) { c.problem.delta = v.number(); };
      p["noise_sigma"] = [](auto &c, auto &v) {
        c.problem.noise_sigma = v.number();
      };
      p["noise_seed"] = [](auto &c, auto &v) {
        Index s = v.integer();
        if (s < 0)
          throw ConfigError("noise_seed must be nonnegative");
        c.problem.noise_seed = static_cast<std::uint64_t>(s);
      };

      KeyTable &s = t["solver"];
      s["name"] = [](ExperimentConfig &c, const Value &v) {
        const std::string n = v.string();
        if (n == "lbfgsb")
          c.solver = SolverName::Lbfgsb;
        else if (n == "tron")
          c.solver = SolverName::Tron;
        else if (n == "spg")
          c.solver = SolverName::Spg;
        else
          throw ConfigError("name must be lbfgsb, tron or spg");
      };
      s["scaled"] = [](auto &c, auto &v) { c.solver_cfg.scaled = v.boolean(); };
      s["label"] = [](auto &c, auto &v) {
        c.label = v.string();
        if (c.label.empty() ||
            c.label.find_first_of(",/\\\" ") != std::string::npos)
          throw ConfigError("label must be nonempty without ',', '/', "
                            "quotes or spaces");
      };
      s["max_iter"] = [](auto &c, auto &v) {
        c.solver_cfg.max_iter = v.positive();
      };
      s["pg_rtol"] = [](auto &c, auto &v) { c.solver_cfg.pg_rtol = v.number(); };
      s["max_time"] = [](auto &c, auto &v) {
        c.solver_cfg.max_time_s = v.number();
      };
      s["cg_rtol"] = [](auto &c, auto &v) { c.solver_cfg.cg.rtol = v.number(); };
      s["cg_maxiter"] = [](auto &c, auto &v) {
        c.solver_cfg.cg.maxiter = v.integer();
      };
      s["lbfgs_memory"] = [](auto &c, auto &v) {
        c.solver_cfg.lbfgs_memory = static_cast<int>(v.positive());
      };
      s["lbfgsb_cauchy"] = [](auto &c, auto &v) {
        const std::string m = v.string();
        if (m == "exact")
          c.solver_cfg.lbfgsb_cauchy = CauchyMode::Exact;
        else if (m == "backtrack")
          c.solver_cfg.lbfgsb_cauchy = CauchyMode::Backtrack;
        else
          throw ConfigError("lbfgsb_cauchy must be exact or backtrack");
      };
      s["lbfgsb_subspace"] = [](auto &c, auto &v) {
        const std::string m = v.string();
        if (m == "smw")
          c.solver_cfg.lbfgsb_subspace = SubspaceMode::Smw;
        else if (m == "cg")
          c.solver_cfg.lbfgsb_subspace = SubspaceMode::Cg;
        else
          throw ConfigError("lbfgsb_subspace must be smw or cg");
      };
      s["cauchy_mu0"] = [](auto &c, auto &v) {
        c.solver_cfg.cauchy.mu0 = v.number();
      };
      s["cauchy_beta"] = [](auto &c, auto &v) {
        c.solver_cfg.cauchy.beta = v.number();
      };
      s["cauchy_max_backtracks"] = [](auto &c, auto &v) {
        c.solver_cfg.cauchy.max_backtracks = v.positive();
      };
      s["wolfe_mu"] = [](auto &c, auto &v) { c.solver_cfg.wolfe.mu = v.number(); };
      s["wolfe_eta"] = [](auto &c, auto &v) {
        c.solver_cfg.wolfe.eta = v.number();
      };
      s["wolfe_max_evals"] = [](auto &c, auto &v) {
        c.solver_cfg.wolfe.max_evals = v.positive();
      };
      s["tr_delta0"] = [](auto &c, auto &v) {
        c.solver_cfg.tr.delta0 = v.number();
      };
      s["tr_eta0"] = [](auto &c, auto &v) { c.solver_cfg.tr.eta0 = v.number(); };
      s["tr_eta1"] = [](auto &c, auto &v) { c.solver_cfg.tr.eta1 = v.number(); };
      s["tr_eta2"] = [](auto &c, auto &v) { c.solver_cfg.tr.eta2 = v.number(); };
      s["tr_sigma1"] = [](auto &c, auto &v) {
        c.solver_cfg.tr.sigma1 = v.number();
      };
      s["tr_sigma2"] = [](auto &c, auto &v) {
        c.solver_cfg.tr.sigma2 = v.number();
      };
      s["tr_sigma3"] = [](auto &c, auto &v) {
        c.solver_cfg.tr.sigma3 = v.number();
      };
      s["tr_max_minor"] = [](auto &c, auto &v) {
        c.solver_cfg.tr.max_minor = v.positive();
      };
      s["spg_memory"] = [](auto &c, auto &v) {
        c.solver_cfg.spg.memory = static_cast<int>(v.positive());
      };
      s["spg_gamma"] = [](auto &c, auto &v) {
        c.solver_cfg.spg.gamma = v.number();
      };
      s["spg_alpha_min"] = [](auto &c, auto &v) {
        c.solver_cfg.spg.alpha_min = v.number();
      };
      s["spg_alpha_max"] = [](auto &c, auto &v) {
        c.solver_cfg.spg.alpha_max = v.number();
      };

      t["output"]["dir"] = [](auto &c, auto &v) { c.output_dir = v.string(); };
      return t;
    }();
    return tables;
  }

  std::string default_label(const ExperimentConfig &c) {
    return std::string(to_string(c.solver)) +
           (c.solver_cfg.scaled ? "-scaled" : "");
  }

}  // namespace

ExperimentConfig parse_config(const std::string &text,
                              const std::string &source) {
  ExperimentConfig cfg;
  cfg.source = source;
  bool rtol_set = false;
  const auto &tables = key_tables();
  const KeyTable *section = nullptr;
  std::string section_name;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string &msg) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("malformed section header");
      section_name = trim(line.substr(1, line.size() - 2));
      auto it = tables.find(section_name);
      if (it == tables.end())
        fail("unknown section [" + section_name + "]");
      section = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == nullptr)
      fail("key '" + key + "' outside of a section");
    auto it = section->find(key);
    if (it == section->end())
      fail("unknown key '" + key + "' in [" + section_name + "]");
    if (!seen.insert(section_name + "." + key).second)
      fail("duplicate key '" + key + "'");
    if (value.empty())
      fail("missing value for '" + key + "'");
    try {
      it->second(cfg, Value{value});
    } catch (const ConfigError &e) {
      fail(e.what());
    }
    if (section_name == "solver" && key == "pg_rtol")
      rtol_set = true;
  }

  if (!rtol_set)
    cfg.solver_cfg.pg_rtol =
        cfg.problem.kind == ProblemKind::Recon ? 1e-7 : 1e-5;
  if (cfg.label.empty())
    cfg.label = default_label(cfg);
  if (cfg.problem.kind == ProblemKind::Recon && !(cfg.problem.delta > 0))
    throw ConfigError(source + ": delta must be positive");
  if (!(cfg.problem.lambda >= 0))
    throw ConfigError(source + ": lambda must be nonnegative");
  if (!(cfg.problem.noise_sigma >= 0))
    throw ConfigError(source + ": noise_sigma must be nonnegative");
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path + ": cannot read config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string problem_key(const ProblemSpec &p) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s n_r=%td n_theta=%td r_max=%.17g n_det=%td lambda=%.17g delta=%.17g "
                "sigma=%.17g seed=%llu",
                p.kind == ProblemKind::Recon ? "recon" : "quadratic",
                static_cast<std::ptrdiff_t>(p.grid.n_r),
                static_cast<std::ptrdiff_t>(p.grid.n_theta), p.grid.r_max,
                static_cast<std::ptrdiff_t>(p.n_det), p.lambda, p.delta,
                p.noise_sigma, static_cast<unsigned long long>(p.noise_seed));
  return buf;
}

SolverResult run_solver(const ExperimentConfig &cfg, const Problem &problem) {
  SolverConfig sc = cfg.solver_cfg;
  if (sc.scaled && !sc.scaling) {
    const BlockCirculantOp h = hessian_approx_bc(*problem.model);
    sc.scaling = std::make_shared<const ScalingOp>(build_scaling(h));
  }
  switch (cfg.solver) {
  case SolverName::Lbfgsb:
    return solve_lbfgsb(*problem.model, problem.x0, sc);
  case SolverName::Tron:
    return solve_tron(*problem.model, problem.x0, sc);
  case SolverName::Spg:
    return solve_spg(*problem.model, problem.x0, sc);
  }
  throw ConfigError("unknown solver");
}

namespace {

  void write_outputs(const ExperimentConfig &cfg, const Problem &problem,
                     const SolverResult &res, double wall,
                     const fs::path &dir) {
    fs::create_directories(dir);
    res.trace.write_csv((dir / "trace.csv").string());

    const PolarGrid &grid = problem.spec.grid;
    const Mat img = polar_to_cartesian(grid, res.x, 256);
    const double vmax = std::max(img.maxCoeff(), 1e-300);
    write_pgm16((dir / "image.pgm").string(), img, vmax);
    const Mat polar = Eigen::Map<const Mat>(res.x.data(), grid.n_r,
                                            grid.n_theta)
                          .transpose();
    write_csv((dir / "image.csv").string(), polar);
    write_csv((dir / "sinogram.csv").string(),
              sinogram_table(problem.b, problem.spec.n_det));

    nlohmann::ordered_json j;
    j["label"] = cfg.label;
    j["solver"] = std::string(to_string(cfg.solver));
    j["scaled"] = cfg.solver_cfg.scaled;
    j["status"] = std::string(to_string(res.status));
    j["iterations"] = res.iterations;
    j["final_f"] = res.f;
    j["pg_ratio"] = res.trace.pg_ratio();
    j["cg_total"] = res.cg_total;
    j["wall_time"] = wall;
    std::ofstream os(dir / "summary.json");
    if (!os)
      throw ConfigError("cannot write " + (dir / "summary.json").string());
    os << j.dump(2) << '\n';
  }

  RunOutcome execute(const ExperimentConfig &cfg, const fs::path &dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const Problem problem = make_problem(cfg.problem);
    RunOutcome out;
    out.result = run_solver(cfg, problem);
    out.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    out.out_dir = dir.string();
    write_outputs(cfg, problem, out.result, out.wall_time, dir);
    return out;
  }

  void apply(ExperimentConfig &cfg, const RunOverrides &ov) {
    if (ov.seed)
      cfg.problem.noise_seed = *ov.seed;
    if (ov.max_time_s)
      cfg.solver_cfg.max_time_s = *ov.max_time_s;
  }

}  // namespace

RunOutcome run_experiment(ExperimentConfig cfg, const RunOverrides &ov) {
  apply(cfg, ov);
  return execute(cfg, ov.out_dir.value_or(cfg.output_dir));
}

std::vector<RunOutcome> run_compare(std::vector<ExperimentConfig> cfgs,
                                    const RunOverrides &ov) {
  if (cfgs.size() < 2)
    throw ConfigError("compare needs at least two configs");
  const std::string key = problem_key(cfgs.front().problem);
  std::set<std::string> labels;
  for (const auto &c: cfgs) {
    if (problem_key(c.problem) != key)
      throw ConfigError(c.source + ": [problem] differs from " +
                        cfgs.front().source);
    if (!labels.insert(c.label).second)
      throw ConfigError(c.source + ": duplicate label '" + c.label + "'");
  }

  const fs::path dir = ov.out_dir.value_or(cfgs.front().output_dir);
  std::vector<RunOutcome> outs;
  std::vector<std::pair<std::string, SolverTrace>> traces;
  for (auto &c: cfgs) {
    apply(c, ov);
    outs.push_back(execute(c, dir / c.label));
    traces.emplace_back(c.label, outs.back().result.trace);
  }
  fs::create_directories(dir);
  std::ofstream os(dir / "compare.csv");
  if (!os)
    throw ConfigError("cannot write " + (dir / "compare.csv").string());
  write_compare_csv(os, traces);
  return outs;
}

}  // namespace circscale
