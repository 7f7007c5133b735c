#include "reic/checkpoint.hpp"

#include <cmath>

namespace reic {

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.bytes(Checkpoint::kMagic.data(), Checkpoint::kMagic.size());
  w.u32(Checkpoint::kVersion);
  w.string(ckpt.config);
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (t.values.size() != static_cast<std::size_t>(t.rows) * t.cols)
      throw ShapeError("checkpoint tensor " + t.name + " has inconsistent size");
    w.string(t.name);
    w.u32(t.rows);
    w.u32(t.cols);
    for (float v : t.values) w.f32(v);
  }
  return w.buffer();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(Checkpoint::kMagic.data(), Checkpoint::kMagic.size(), "REICCKPT");
  const auto version_at = r.offset();
  const auto version = r.u32();
  if (version != Checkpoint::kVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version), version_at);

  Checkpoint ckpt;
  ckpt.config = r.string();
  const auto n = r.u32();
  for (std::uint32_t k = 0; k < n; ++k) {
    Checkpoint::Tensor t;
    t.name = r.string();
    t.rows = r.u32();
    t.cols = r.u32();
    const auto count = static_cast<std::uint64_t>(t.rows) * t.cols;
    r.require(count * 4, "tensor values");
    t.values.resize(count);
    for (auto& v : t.values) {
      const auto at = r.offset();
      v = r.f32();
      if (!std::isfinite(v)) throw FormatError("non-finite parameter in " + t.name, at);
    }
    ckpt.tensors.push_back(std::move(t));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last tensor", r.offset());
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace reic
