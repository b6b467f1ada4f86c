#include "swarmnet/checkpoint.hpp"

#include "binary_io.hpp"
#include "swarmnet/errors.hpp"

namespace swarmnet {

namespace {
constexpr std::string_view kMagic = "SWMC";
}

std::string encode_checkpoint(const RunConfig& cfg, const model::SwarmNet& net) {
  if (!(cfg.model == net.config())) throw ConfigError("checkpoint config does not describe the model");
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  const std::string doc = to_json(cfg);
  w.u32(static_cast<std::uint32_t>(doc.size()));
  w.bytes(doc);
  const auto named = net.params().named();
  w.u32(static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, t] : named) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values()) w.f32(v);
  }
  return w.str();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  detail::ByteReader r(bytes, "checkpoint");
  if (r.bytes(4) != kMagic) throw FormatError("not a checkpoint (bad magic)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto doc_len = r.u32();
  RunConfig cfg = parse_run_config(r.bytes(doc_len));

  model::SwarmNetParams params = model::SwarmNet::init_params(cfg.model, 0);
  auto named = params.named();
  const auto count = r.u32();
  if (count != named.size()) {
    throw DimensionError("checkpoint holds " + std::to_string(count) + " tensors; configuration needs " +
                         std::to_string(named.size()));
  }
  for (auto& [name, t] : named) {
    const auto name_len = r.u32();
    const std::string_view got = r.bytes(name_len);
    if (got != name) throw FormatError("checkpoint tensor '" + std::string(got) + "' where '" + name + "' expected");
    const auto rank = r.u32();
    diff::Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    if (shape != t.shape()) {
      throw DimensionError("checkpoint tensor '" + name + "' has shape " + diff::to_string(shape) +
                           "; configuration needs " + diff::to_string(t.shape()));
    }
    for (float& v : t.mutable_values()) v = r.f32();
  }
  if (!r.done()) throw FormatError("checkpoint: trailing bytes");
  model::SwarmNet net(cfg.model, std::move(params));
  return Checkpoint{std::move(cfg), std::move(net)};
}

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const model::SwarmNet& net) {
  detail::write_file(path, encode_checkpoint(cfg, net));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(detail::read_file(path)); }

}  // namespace swarmnet
