#include "session.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "swarmnet/errors.hpp"

namespace swarmnet::cli {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SWARMNET_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string_view s(raw);
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ConfigError("SWARMNET_SEED must be an unsigned integer, got '" + std::string(s) + "'");
  }
  return v;
}

Session::Session(const GlobalOptions& opts)
    : cfg_(opts.config_path.empty() ? parse_run_config("{}") : load_run_config(opts.config_path)),
      from_file_(!opts.config_path.empty()),
      seed_(opts.seed ? opts.seed : env_seed()),
      jobs_(opts.jobs),
      out_dir_(opts.out_dir) {
  if (seed_) {
    cfg_.train.seed = *seed_;
    cfg_.noise.seed = *seed_;
  }
  if (opts.jobs) cfg_.eval.jobs = *opts.jobs;
}

void Session::adopt_checkpoint(const RunConfig& embedded) {
  RunConfig next = embedded;
  if (from_file_) {
    next.eval = cfg_.eval;
    next.noise = cfg_.noise;
  } else if (seed_) {
    next.noise.seed = *seed_;
  }
  if (jobs_) next.eval.jobs = *jobs_;
  cfg_ = next;
}

void Session::finalize() {
  cfg_.resolve();
  cfg_.validate();
}

fs::path Session::output(const std::string& name) const { return out_dir_ / name; }

void Session::write_text(const fs::path& path, std::string_view text) const {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

json Session::provenance(const std::string& command, const json& parameters) const {
  return json{{"command", command}, {"parameters", parameters}, {"config", json::parse(to_json(cfg_))}};
}

void Session::write_sidecar(const fs::path& artifact, const std::string& command, const json& parameters) const {
  json doc = provenance(command, parameters);
  doc["artifact"] = artifact.filename().string();
  write_text(fs::path(artifact.string() + ".config.json"), doc.dump(2) + "\n");
}

}  // namespace swarmnet::cli
