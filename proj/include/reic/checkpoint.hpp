#ifndef REIC_CHECKPOINT_HPP
#define REIC_CHECKPOINT_HPP

#include "reic/binary_io.hpp"
#include "reic/nn/params.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace reic {

/// "REICCKPT" | u32 version | u32 len + config text | u32 n_tensors |
/// per tensor: u32 len + name | u32 rows | u32 cols | rows*cols f32 row-major.
struct Checkpoint {
  static constexpr std::array<char, 8> kMagic{'R', 'E', 'I', 'C', 'C', 'K', 'P', 'T'};
  static constexpr std::uint32_t kVersion = 1;

  struct Tensor {
    std::string name;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> values;  // row-major
  };

  std::string config;
  std::vector<Tensor> tensors;
};

template <typename Scalar>
Checkpoint make_checkpoint(std::span<const nn::ParamSlot<Scalar>> params, std::string config) {
  Checkpoint ckpt{std::move(config), {}};
  for (const auto& slot : params) {
    Checkpoint::Tensor t{slot.name, static_cast<std::uint32_t>(slot.rows), static_cast<std::uint32_t>(slot.cols), {}};
    t.values.reserve(static_cast<std::size_t>(slot.size()));
    // Slots are column-major; files are row-major.
    for (Index i = 0; i < slot.rows; ++i)
      for (Index j = 0; j < slot.cols; ++j) t.values.push_back(static_cast<float>(slot.value[j * slot.rows + i]));
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

/// Copies tensors into matching parameter slots; names and shapes must agree.
template <typename Scalar>
void restore_parameters(const Checkpoint& ckpt, std::span<const nn::ParamSlot<Scalar>> params) {
  if (ckpt.tensors.size() != params.size())
    throw DataError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model has " +
                    std::to_string(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& t = ckpt.tensors[k];
    const auto& slot = params[k];
    if (t.name != slot.name || t.rows != slot.rows || t.cols != slot.cols)
      throw DataError("checkpoint tensor " + t.name + " does not match model parameter " + slot.name);
    for (Index i = 0; i < slot.rows; ++i)
      for (Index j = 0; j < slot.cols; ++j)
        slot.value[j * slot.rows + i] = static_cast<Scalar>(t.values[static_cast<std::size_t>(i * slot.cols + j)]);
  }
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace reic

#endif  // REIC_CHECKPOINT_HPP
