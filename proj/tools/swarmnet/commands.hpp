#pragma once

#include <functional>

#include <CLI11.hpp>

#include "session.hpp"

namespace swarmnet::cli {

/// Registers generate, train, eval, ablate, sweep, rollout, sample, clone and
/// plot. Parsing a subcommand stores its work in `action`.
void add_commands(CLI::App& app, const GlobalOptions& globals, std::function<void()>& action);

}  // namespace swarmnet::cli
