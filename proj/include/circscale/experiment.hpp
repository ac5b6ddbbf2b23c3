//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circscale/ct.hpp"
#include "circscale/solvers.hpp"

namespace circscale {

enum class SolverName { Lbfgsb, Tron, Spg };

std::string_view to_string(SolverName s);

/**
 * @brief One experiment, read from a sectioned key = value file:
 *
 *   [problem]  kind, n_r, n_theta, n_det, lambda, delta, noise_sigma,
 *              noise_seed
 *   [solver]   name, scaled, label and solver parameters
 *   [output]   dir
 *
 * Unknown sections or keys are errors.
 */
struct ExperimentConfig {
  ProblemSpec problem;
  SolverName solver = SolverName::Tron;
  SolverConfig solver_cfg;
  std::string label;
  std::string output_dir = "out";
  std::string source;
};

/// Throws ConfigError with "source:line: message" diagnostics.
ExperimentConfig parse_config(const std::string &text,
                              const std::string &source = "<config>");
ExperimentConfig load_config(const std::string &path);

/// Canonical text of the problem section, used to match configs.
std::string problem_key(const ProblemSpec &p);

struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> max_time_s;
};

struct RunOutcome {
  SolverResult result;
  double wall_time = 0;
  std::string out_dir;
};

/// Builds the problem and the scaling, runs the solver.
SolverResult run_solver(const ExperimentConfig &cfg, const Problem &problem);

/// run_solver plus trace.csv, image.pgm, image.csv, sinogram.csv and
/// summary.json in the output directory.
RunOutcome run_experiment(ExperimentConfig cfg, const RunOverrides &ov = {});

/// Runs every config and writes compare.csv to the output directory (the
/// override, else the first config's). Each run writes its own files to
/// <dir>/<label>. Throws ConfigError on fewer than two configs, differing
/// problem sections or duplicate labels.
std::vector<RunOutcome> run_compare(std::vector<ExperimentConfig> cfgs,
                                    const RunOverrides &ov = {});

int exit_code(SolverStatus s);

}  // namespace circscale
