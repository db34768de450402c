#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floormatch/nn/tensor.hpp"

namespace floormatch::nn {

template <class T>
struct NamedParam {
  std::string name;
  Tensor<T> tensor;
};

// On-disk checkpoint: little-endian binary container mapping parameter names
// to shape + float32 payload, with a format version and a free-form metadata
// string (the model/problem config as JSON).
//
//   magic "FMCK" | u32 version | u32 meta_len | meta bytes | u32 count |
//   per entry: u32 name_len | name | u8 dtype(0=f32) | u32 ndim | u32 dims... | payload
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;
  std::string meta;
  std::vector<std::pair<std::string, Tensor<float>>> entries;

  const Tensor<float>* find(const std::string& name) const {
    for (const auto& [n, t] : entries)
      if (n == name) return &t;
    return nullptr;
  }
};

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint payloads into existing parameters by name; every
// parameter must be present with a matching shape.
template <class T>
void load_into(const Checkpoint& ckpt, std::vector<NamedParam<T>>& params) {
  for (auto& p : params) {
    const Tensor<float>* src = ckpt.find(p.name);
    if (!src) throw ConfigError("checkpoint missing parameter '" + p.name + "'");
    if (src->shape() != p.tensor.shape())
      throw DimensionError("checkpoint shape mismatch for '" + p.name + "': " +
                           shape_str(src->shape()) + " vs " + shape_str(p.tensor.shape()));
    auto dst = p.tensor.data();
    auto s = src->data();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(s[i]);
  }
}

template <class T>
Checkpoint to_checkpoint(const std::vector<NamedParam<T>>& params, std::string meta) {
  Checkpoint ck;
  ck.meta = std::move(meta);
  for (const auto& p : params) {
    std::vector<float> data(p.tensor.data().begin(), p.tensor.data().end());
    ck.entries.emplace_back(p.name, Tensor<float>::from_data(p.tensor.shape(), std::move(data)));
  }
  return ck;
}

}  // namespace floormatch::nn
