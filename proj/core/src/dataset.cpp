#include "swarmnet/dataset.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "swarmnet/errors.hpp"

namespace swarmnet {

namespace detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace detail

namespace gen {

std::vector<Episode> make_dataset(ModelTag tag, const SimConfig& cfg, int count,
                                  std::uint64_t base_seed) {
  if (count < 1) throw ConfigError("episode count must be at least 1");
  std::vector<Episode> episodes;
  episodes.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) episodes.push_back(simulate(tag, cfg, base_seed + static_cast<std::uint64_t>(k)));
  return episodes;
}

std::string encode_dataset(std::span<const Episode> episodes) {
  detail::ByteWriter w;
  w.bytes("SWM1");
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(episodes.size()));
  for (const auto& ep : episodes) {
    w.u32(static_cast<std::uint32_t>(ep.steps));
    w.u32(static_cast<std::uint32_t>(ep.agents));
    w.u32(static_cast<std::uint32_t>(ep.state_dim));
    w.u32(static_cast<std::uint32_t>(ep.context.size()));
    for (float v : ep.states) w.f32(v);
    for (float v : ep.context) w.f32(v);
    w.u8(static_cast<std::uint8_t>(ep.tag));
    w.u64(ep.seed);
  }
  return w.str();
}

std::vector<Episode> decode_dataset(std::string_view bytes) {
  detail::ByteReader r(bytes, "dataset");
  if (r.bytes(4) != "SWM1") throw FormatError("dataset: bad magic (expected SWM1)");
  const auto version = r.u32();
  if (version != kDatasetVersion) {
    throw FormatError("dataset: unsupported version " + std::to_string(version));
  }
  const auto count = r.u32();
  std::vector<Episode> episodes;
  episodes.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    Episode ep;
    ep.steps = static_cast<int>(r.u32());
    ep.agents = static_cast<int>(r.u32());
    ep.state_dim = static_cast<int>(r.u32());
    const auto dc = r.u32();
    if (ep.state_dim != kStateDim || ep.agents < 1 || ep.steps < 1) {
      throw FormatError("dataset: episode " + std::to_string(k) + " has invalid dimensions");
    }
    ep.states.resize(static_cast<std::size_t>(ep.steps) * ep.agents * ep.state_dim);
    for (auto& v : ep.states) v = r.f32();
    ep.context.resize(dc);
    for (auto& v : ep.context) v = r.f32();
    const auto tag = r.u8();
    if (tag > 2) throw FormatError("dataset: unknown model tag " + std::to_string(tag));
    ep.tag = static_cast<ModelTag>(tag);
    ep.seed = r.u64();
    episodes.push_back(std::move(ep));
  }
  if (!r.done()) throw FormatError("dataset: trailing bytes after last episode");
  return episodes;
}

void write_dataset(const std::filesystem::path& path, std::span<const Episode> episodes) {
  detail::write_file(path, encode_dataset(episodes));
}

std::vector<Episode> read_dataset(const std::filesystem::path& path) {
  return decode_dataset(detail::read_file(path));
}

}  // namespace gen
}  // namespace swarmnet
