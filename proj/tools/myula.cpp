#include <CLI11.hpp>
#include <iostream>

#include "myula/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = myula::cli;
  CLI::App app{"MYULA sampling experiments and bound calculators"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  cli::RunOptions opts;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t dim = 0;
  std::string out = "run";

  const char* help[] = {"generic chain run with diagnostics",
                        "truncated Gaussian presets (d = 2, 10, 100) with MYULA, RWM and PLMC",
                        "annealed volume estimation of a convex body",
                        "LASSO posterior medians along a grid of l1 radii",
                        "regularisation bounds on TV and W1 over a lambda sweep",
                        "stepsize and iteration count planner"};
  std::size_t k = 0;
  for (const auto& name : cli::subcommands()) {
    auto* sub = app.add_subcommand(name, help[k++]);
    sub->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the seed key)");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--reps", reps, "repetitions / chains (overrides the reps key)")->check(CLI::PositiveNumber);
    sub->add_flag("--paper-scale", opts.paper_scale, "use the full sample budgets");
    sub->add_option("--threads", opts.threads, "worker threads; outputs do not depend on it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--set", opts.overrides, "override a config entry, key=value (repeatable)");
    if (name == "tmg") sub->add_option("--dim", dim, "preset dimension: 2, 10 or 100");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--config")) opts.config_path = config_path;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--reps")) opts.reps = reps;
  if (sub->get_name() == "tmg" && sub->count("--dim")) opts.overrides.push_back("tmg.dim=" + std::to_string(dim));
  opts.out = out;
  return cli::run(sub->get_name(), opts, std::cout, std::cerr);
}
