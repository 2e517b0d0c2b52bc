// bcl: simulate, sweep, bc-check, analyze, selftest.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcl/config.hpp"
#include "bcl/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::optional<std::string> out;
  bool resume = false;
};

void add_common(CLI::App* app, Common& c, bool with_resume) {
  app->add_option("--config", c.config, "key = value experiment file");
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--replicas", c.replicas, "replica count (overrides the config)")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory (overrides the config)");
  if (with_resume) app->add_flag("--resume", c.resume, "reuse finished replicas in --out");
}

bcl::ExperimentConfig resolve(const Common& c) {
  bcl::ExperimentConfig cfg = c.config.empty() ? bcl::ExperimentConfig{}
                                               : bcl::load_experiment(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.replicas) cfg.replicas = *c.replicas;
  if (c.out) cfg.out_dir = *c.out;
  return cfg;
}

int report(const bcl::CommandResult& r) {
  std::cout << r.message << '\n';
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-exchange chain with a moving heat bath: fluctuation experiments"};
  app.require_subcommand(1);

  Common sim_opts, sweep_opts, bc_opts;
  auto* sim = app.add_subcommand("simulate", "run replicas and write JSONL observations");
  add_common(sim, sim_opts, true);
  auto* sweep = app.add_subcommand("sweep", "(kappa, delta) regime sweep with verdicts");
  add_common(sweep, sweep_opts, true);
  auto* bc = app.add_subcommand("bc-check", "boundary functional scaling in n");
  add_common(bc, bc_opts, false);

  std::vector<std::string> paths;
  std::string analyze_out = ".";
  auto* analyze = app.add_subcommand("analyze", "summarize JSONL observation files");
  analyze->add_option("paths", paths, "files or directories")->required();
  analyze->add_option("--out", analyze_out, "output directory");

  std::uint64_t self_seed = 20240601;
  auto* self = app.add_subcommand("selftest", "quick invariant checks");
  self->add_option("--seed", self_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return report(bcl::cmd_simulate(resolve(sim_opts), sim_opts.resume));
    if (*sweep) return report(bcl::cmd_sweep(resolve(sweep_opts), sweep_opts.resume));
    if (*bc) return report(bcl::cmd_bc_check(resolve(bc_opts)));
    if (*analyze) return report(bcl::cmd_analyze(paths, analyze_out));
    if (*self) {
      const auto r = bcl::cmd_selftest(self_seed);
      for (const auto& c : r.summary["checks"])
        std::cout << (c["pass"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>()
                  << "  " << c["detail"].get<std::string>() << '\n';
      return report(r);
    }
  } catch (const bcl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
