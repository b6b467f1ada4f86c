#pragma once

// "SWMC" | u32 version | u32 config length | canonical config JSON |
// u32 tensor count | per tensor: u32 name length, name, u32 rank, u32 dims,
// f32 values. Little-endian throughout.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "swarmnet/model.hpp"
#include "swarmnet/run_config.hpp"

namespace swarmnet {

constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  model::SwarmNet model;
};

std::string encode_checkpoint(const RunConfig& cfg, const model::SwarmNet& net);
/// Rejects foreign magic or version, unknown or missing tensors, and shapes
/// that disagree with the embedded configuration.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const model::SwarmNet& net);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace swarmnet
