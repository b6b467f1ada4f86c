#pragma once

// Self-contained SVG trajectory plots: ground truth as dashed gray lines,
// predictions as per-agent colored arrow chains, stochastic samples as faint
// per-agent envelopes, obstacles as circles and the goal as a marker.

#include <optional>
#include <string>
#include <vector>

#include "swarmnet/rollout.hpp"
#include "swarmnet/swarmgen.hpp"

namespace swarmnet::plot {

struct PlotSpec {
  const gen::Episode* truth = nullptr;
  /// Deterministic prediction or, in stochastic mode, samples plus their mean.
  const rollout::RolloutResult* prediction = nullptr;
  /// Positions [N, 2] the first predicted step is drawn from (typically the last observed state).
  std::vector<float> anchor;
  gen::ContextSpec context;
  std::string title;
  std::string metadata;  // embedded verbatim (XML-escaped) in <metadata>
  int width = 640;
  int height = 640;
};

/// Distinct color per agent, cycling after ten.
std::string agent_color(int agent);

std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace swarmnet::plot
