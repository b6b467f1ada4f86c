#pragma once

// Shared state of one CLI invocation: the resolved run configuration, the seed,
// and the output directory every artifact is written under.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "swarmnet/run_config.hpp"

namespace swarmnet::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<int> jobs;
};

/// SWARMNET_SEED when set; throws ConfigError if it is not an unsigned integer.
std::optional<std::uint64_t> env_seed();

class Session {
 public:
  /// Loads --config (or defaults) and applies the global seed and --jobs.
  explicit Session(const GlobalOptions& opts);

  RunConfig& config() { return cfg_; }
  const RunConfig& config() const { return cfg_; }
  /// Re-derives dependent fields and validates after command-line overrides.
  void finalize();
  /// Takes the simulator, model and training sections from a checkpoint. The
  /// eval and noise sections come from --config when one was given.
  void adopt_checkpoint(const RunConfig& embedded);

  /// Explicit --seed, else SWARMNET_SEED, else `fallback`.
  std::uint64_t seed_or(std::uint64_t fallback) const { return seed_.value_or(fallback); }
  bool has_seed() const { return seed_.has_value(); }

  fs::path output(const std::string& name) const;
  void write_text(const fs::path& path, std::string_view text) const;
  /// `<artifact>.config.json`: command, its parameters and the resolved config.
  void write_sidecar(const fs::path& artifact, const std::string& command, const json& parameters) const;
  json provenance(const std::string& command, const json& parameters) const;

 private:
  RunConfig cfg_;
  bool from_file_ = false;
  std::optional<std::uint64_t> seed_;
  std::optional<int> jobs_;
  fs::path out_dir_;
};

}  // namespace swarmnet::cli
