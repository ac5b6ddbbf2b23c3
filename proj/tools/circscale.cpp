//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "circscale/error.hpp"
#include "circscale/experiment.hpp"

using namespace circscale;

namespace {

void report(const RunOutcome &o, const std::string &label) {
  const auto &r = o.result;
  std::printf("%s: %s after %td iterations, pg_ratio %.3e, cg %td -> %s\n",
              label.c_str(), std::string(to_string(r.status)).c_str(),
              static_cast<std::ptrdiff_t>(r.iterations), r.trace.pg_ratio(),
              static_cast<std::ptrdiff_t>(r.cg_total), o.out_dir.c_str());
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bound-constrained solvers with block-circulant scaling"};
  app.require_subcommand(1);

  RunOverrides ov;
  std::string out;
  std::uint64_t seed = 0;
  double max_time = 0;
  auto add_flags = [&](CLI::App *sub) {
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Noise seed override");
    sub->add_option("--max-time", max_time, "Wall-clock budget in seconds")
        ->check(CLI::PositiveNumber);
  };

  std::string run_path;
  CLI::App *run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", run_path, "Experiment config")->required();
  add_flags(run);

  std::vector<std::string> cmp_paths;
  CLI::App *cmp =
      app.add_subcommand("compare", "Run experiments sharing one problem");
  cmp->add_option("configs", cmp_paths, "Experiment configs")->required();
  add_flags(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App *sub = run->parsed() ? run : cmp;
  if (sub->count("--out"))
    ov.out_dir = out;
  if (sub->count("--seed"))
    ov.seed = seed;
  if (sub->count("--max-time"))
    ov.max_time_s = max_time;

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = load_config(run_path);
      const std::string label = cfg.label;
      RunOutcome o = run_experiment(std::move(cfg), ov);
      report(o, label);
      return exit_code(o.result.status);
    }
    std::vector<ExperimentConfig> cfgs;
    for (const auto &p: cmp_paths)
      cfgs.push_back(load_config(p));
    std::vector<std::string> labels;
    for (const auto &c: cfgs)
      labels.push_back(c.label);
    auto outs = run_compare(std::move(cfgs), ov);
    int code = 0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      report(outs[i], labels[i]);
      code = std::max(code, exit_code(outs[i].result.status));
    }
    return code;
  } catch (const ConfigError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
