#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmnet/swarmgen.hpp"

namespace swarmnet::gen {

/// Episodes for seeds base_seed .. base_seed + count - 1.
std::vector<Episode> make_dataset(ModelTag tag, const SimConfig& cfg, int count,
                                  std::uint64_t base_seed);

/// "SWM1" | u32 version | u32 count | per episode: u32 T, N, D, d_c, states,
/// context, u8 tag, u64 seed. Little-endian throughout.
std::string encode_dataset(std::span<const Episode> episodes);
std::vector<Episode> decode_dataset(std::string_view bytes);

void write_dataset(const std::filesystem::path& path, std::span<const Episode> episodes);
std::vector<Episode> read_dataset(const std::filesystem::path& path);

constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace swarmnet::gen
