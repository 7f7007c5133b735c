#ifndef REIC_BINARY_IO_HPP
#define REIC_BINARY_IO_HPP

#include "reic/core.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace reic {

/// Little-endian byte sink.
class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void string(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int k = 0; k < n; ++k) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  std::vector<std::uint8_t> buf_;
};

/// Little-endian byte source; every failure reports its byte offset.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t offset() const { return pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  void require(std::uint64_t n, const char* what) const {
    if (data_.size() - pos_ < n)
      throw FormatError(std::string("truncated file while reading ") + what + ": need " + std::to_string(n) +
                            " bytes, " + std::to_string(data_.size() - pos_) + " left",
                        pos_);
  }

  void expect_magic(const char* magic, std::size_t n, const char* name) {
    require(n, "magic");
    for (std::size_t k = 0; k < n; ++k)
      if (data_[pos_ + k] != static_cast<std::uint8_t>(magic[k]))
        throw FormatError(std::string("bad magic: expected \"") + name + "\"", pos_);
    pos_ += n;
  }

  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4, "u32")); }
  std::uint64_t u64() { return get_le(8, "u64"); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string string() {
    const auto n = u32();
    require(n, "string");
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::uint64_t get_le(int n, const char* what) {
    require(static_cast<std::uint64_t>(n), what);
    std::uint64_t v = 0;
    for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(data_[pos_ + k]) << (8 * k);
    pos_ += static_cast<std::uint64_t>(n);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::uint64_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace reic

#endif  // REIC_BINARY_IO_HPP
