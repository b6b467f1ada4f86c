#include <malloc.h>

#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "swarmnet/errors.hpp"

namespace {

int exit_code(swarmnet::ErrorCategory c) {
  switch (c) {
    case swarmnet::ErrorCategory::io: return 1;
    case swarmnet::ErrorCategory::usage: return 2;
    case swarmnet::ErrorCategory::numeric: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  // Training churns through many short-lived tensors of a few hundred KB.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);

  using namespace swarmnet::cli;
  CLI::App app{"SwarmNet: learn, predict and imitate swarm trajectories"};
  app.name("swarmnet");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions globals;
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--config", globals.config_path, "Run configuration JSON");
  auto* seed_opt = app.add_option("--seed", seed, "Global seed (falls back to SWARMNET_SEED)");
  app.add_option("--out-dir", globals.out_dir, "Directory all outputs are written under");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads for ablate and sweep")->check(CLI::PositiveNumber);

  std::function<void()> action;
  add_commands(app, globals, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (seed_opt->count() > 0) globals.seed = seed;
  if (jobs_opt->count() > 0) globals.jobs = jobs;

  try {
    action();
  } catch (const swarmnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
