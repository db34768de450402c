#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "floormatch/common.hpp"
#include "floormatch/nn/checkpoint.hpp"
#include "floormatch/nn/ops.hpp"
#include "floormatch/synth/apartment.hpp"

namespace floormatch::enc {

using floormatch::synth::RoomType;

// Mini-VGG schema: conv blocks of 3x3/pad-1 convolutions with relu, each
// followed by a 2x2 maxpool, then a single linear layer to feature_dim.
struct EncoderConfig {
  int in_channels = 3;
  int input_h = 48;
  int input_w = 48;
  std::vector<std::pair<int, int>> blocks = {{16, 1}, {32, 1}, {64, 1}, {64, 1}};  // (out_ch, n_convs)
  int feature_dim = 64;
  float init_sigma = 0.001f;
};

template <class T>
struct LinearLayer {
  nn::Tensor<T> weight;  // [out, in]
  nn::Tensor<T> bias;    // [out]

  LinearLayer() = default;
  LinearLayer(int out, int in, T sigma, Rng& rng) {
    std::vector<T> w(static_cast<size_t>(out) * in);
    for (auto& v : w) v = static_cast<T>(rng.normal(0.0, sigma));
    weight = nn::Tensor<T>::param({out, in}, std::move(w));
    bias = nn::Tensor<T>::param({out}, std::vector<T>(static_cast<size_t>(out), T(0)));
  }

  nn::Tensor<T> forward(const nn::Tensor<T>& x) const { return nn::linear(x, weight, bias); }
};

template <class T>
struct ConvLayer {
  nn::Tensor<T> weight;  // [out, in, 3, 3]
  nn::Tensor<T> bias;    // [out]

  ConvLayer() = default;
  ConvLayer(int out, int in, T sigma, Rng& rng) {
    std::vector<T> w(static_cast<size_t>(out) * in * 9);
    for (auto& v : w) v = static_cast<T>(rng.normal(0.0, sigma));
    weight = nn::Tensor<T>::param({out, in, 3, 3}, std::move(w));
    bias = nn::Tensor<T>::param({out}, std::vector<T>(static_cast<size_t>(out), T(0)));
  }
};

// The convolutional part of an encoder; may be shared between room-type
// encoders (exact parameter aliasing, not copies).
template <class T>
class ConvStack {
 public:
  ConvStack(const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.input_h < 1 || cfg.input_w < 1 || cfg.in_channels < 1)
      throw ConfigError("encoder input dimensions must be positive");
    int h = cfg.input_h, w = cfg.input_w;
    int in_ch = cfg.in_channels;
    for (auto [out_ch, n_convs] : cfg.blocks) {
      if (h % 2 != 0 || w % 2 != 0 || h < 2 || w < 2)
        throw ConfigError("encoder config underflows spatial size at " + std::to_string(h) +
                          "x" + std::to_string(w));
      std::vector<ConvLayer<T>> block;
      for (int i = 0; i < n_convs; ++i) {
        block.emplace_back(out_ch, in_ch, static_cast<T>(cfg.init_sigma), rng);
        in_ch = out_ch;
      }
      blocks_.push_back(std::move(block));
      h /= 2;
      w /= 2;
      spatial_.emplace_back(h, w);
    }
    out_h_ = h;
    out_w_ = w;
  }

  // run blocks [from, to); to = -1 means all remaining
  nn::Tensor<T> forward(const nn::Tensor<T>& x, int from = 0, int to = -1) const {
    int end = to < 0 ? static_cast<int>(blocks_.size()) : to;
    nn::Tensor<T> h = x;
    for (int b = from; b < end; ++b) {
      for (const auto& layer : blocks_[static_cast<size_t>(b)])
        h = nn::relu(nn::conv2d(h, layer.weight, layer.bias, 1, 1));
      h = nn::maxpool2x2(h);
    }
    return h;
  }

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int channels_after(int block) const {
    // block is 1-based; 0 = input
    return block == 0 ? cfg_.in_channels : cfg_.blocks[static_cast<size_t>(block - 1)].first;
  }
  std::pair<int, int> spatial_after(int block) const {
    return block == 0 ? std::pair<int, int>{cfg_.input_h, cfg_.input_w}
                      : spatial_[static_cast<size_t>(block - 1)];
  }
  int64_t flat_dim() const {
    return static_cast<int64_t>(channels_after(num_blocks())) * out_h_ * out_w_;
  }
  const EncoderConfig& config() const { return cfg_; }

  void collect(std::vector<nn::NamedParam<T>>& out, const std::string& prefix) const {
    for (size_t b = 0; b < blocks_.size(); ++b)
      for (size_t l = 0; l < blocks_[b].size(); ++l) {
        std::string base = prefix + "block" + std::to_string(b + 1) + ".conv" +
                           std::to_string(l + 1) + ".";
        out.push_back({base + "weight", blocks_[b][l].weight});
        out.push_back({base + "bias", blocks_[b][l].bias});
      }
  }

 private:
  EncoderConfig cfg_;
  std::vector<std::vector<ConvLayer<T>>> blocks_;
  std::vector<std::pair<int, int>> spatial_;
  int out_h_ = 0, out_w_ = 0;
};

// Full encoder: conv stack + one fc to feature_dim. The feature itself is
// linear; downstream heads apply their own nonlinearity.
template <class T>
class Encoder {
 public:
  Encoder(const EncoderConfig& cfg, Rng& rng)
      : stack_(std::make_shared<ConvStack<T>>(cfg, rng)) {
    init_fc(cfg, rng);
  }

  // share an existing conv stack, own only the fc (room-aware fc-only mode)
  Encoder(std::shared_ptr<ConvStack<T>> stack, Rng& rng) : stack_(std::move(stack)) {
    init_fc(stack_->config(), rng);
  }

  nn::Tensor<T> encode(const nn::Tensor<T>& images) const {
    return feature_from_maps(stack_->forward(images));
  }

  struct Taps {
    nn::Tensor<T> feature;                       // [N, D]
    std::vector<nn::Tensor<T>> block_outputs;    // post-pool output of each block
  };

  // one forward pass; taps are graph nodes of that same pass
  Taps encode_with_taps(const nn::Tensor<T>& images) const {
    Taps taps;
    nn::Tensor<T> h = images;
    for (int b = 0; b < stack_->num_blocks(); ++b) {
      h = stack_->forward(h, b, b + 1);
      taps.block_outputs.push_back(h);
    }
    taps.feature = feature_from_maps(h);
    return taps;
  }

  nn::Tensor<T> feature_from_maps(const nn::Tensor<T>& maps) const {
    int n = maps.dim(0);
    auto flat = nn::reshape(maps, {n, static_cast<int>(nn::numel(maps.shape()) / n)});
    return fc_.forward(flat);
  }

  const std::shared_ptr<ConvStack<T>>& stack() const { return stack_; }
  int feature_dim() const { return fc_.weight.dim(0); }

  void collect(std::vector<nn::NamedParam<T>>& out, const std::string& prefix,
               bool include_stack = true) const {
    if (include_stack) stack_->collect(out, prefix);
    out.push_back({prefix + "fc.weight", fc_.weight});
    out.push_back({prefix + "fc.bias", fc_.bias});
  }

 private:
  void init_fc(const EncoderConfig& cfg, Rng& rng) {
    if (cfg.feature_dim < 1) throw ConfigError("feature_dim must be positive");
    fc_ = LinearLayer<T>(cfg.feature_dim, static_cast<int>(stack_->flat_dim()),
                         static_cast<T>(cfg.init_sigma), rng);
  }

  std::shared_ptr<ConvStack<T>> stack_;
  LinearLayer<T> fc_;
};

enum class ShareMode { room_agnostic, room_aware_full, room_aware_fc_only };

inline const char* to_string(ShareMode m) {
  switch (m) {
    case ShareMode::room_agnostic: return "room_agnostic";
    case ShareMode::room_aware_full: return "room_aware_full";
    case ShareMode::room_aware_fc_only: return "room_aware_fc_only";
  }
  return "?";
}

// Per-room-type encoders with the sharing structure of the chosen mode.
// room_agnostic aliases one encoder for every room; room_aware_fc_only
// shares the conv stack and gives each room its own fc.
template <class T>
class EncoderBank {
 public:
  static EncoderBank make(ShareMode mode, const EncoderConfig& cfg, Rng& rng,
                          const std::vector<RoomType>& rooms) {
    EncoderBank bank;
    bank.mode_ = mode;
    bank.rooms_ = rooms;
    if (mode == ShareMode::room_agnostic) {
      // one encoder regardless of room type: alias it for every room so an
      // agnostic model accepts photos of any type
      auto shared = std::make_shared<Encoder<T>>(cfg, rng);
      for (RoomType t : synth::kRoomTypes) bank.by_room_[static_cast<size_t>(t)] = shared;
    } else if (mode == ShareMode::room_aware_full) {
      for (RoomType t : rooms)
        bank.by_room_[static_cast<size_t>(t)] = std::make_shared<Encoder<T>>(cfg, rng);
    } else {
      auto stack = std::make_shared<ConvStack<T>>(cfg, rng);
      for (RoomType t : rooms)
        bank.by_room_[static_cast<size_t>(t)] = std::make_shared<Encoder<T>>(stack, rng);
    }
    return bank;
  }

  const Encoder<T>& room(RoomType t) const {
    const auto& p = by_room_[static_cast<size_t>(t)];
    if (!p) throw ConfigError(std::string("no encoder for room type ") + synth::to_string(t));
    return *p;
  }
  std::shared_ptr<Encoder<T>> room_ptr(RoomType t) const { return by_room_[static_cast<size_t>(t)]; }
  ShareMode mode() const { return mode_; }
  const std::vector<RoomType>& rooms() const { return rooms_; }

  void collect(std::vector<nn::NamedParam<T>>& out, const std::string& prefix) const {
    if (mode_ == ShareMode::room_agnostic) {
      by_room_[static_cast<size_t>(rooms_[0])]->collect(out, prefix + "shared.");
    } else if (mode_ == ShareMode::room_aware_full) {
      for (RoomType t : rooms_)
        by_room_[static_cast<size_t>(t)]->collect(out, prefix + synth::to_string(t) + ".");
    } else {
      by_room_[static_cast<size_t>(rooms_[0])]->stack()->collect(out, prefix + "shared_conv.");
      for (RoomType t : rooms_)
        by_room_[static_cast<size_t>(t)]->collect(out, prefix + std::string(synth::to_string(t)) + ".",
                                                  /*include_stack=*/false);
    }
  }

 private:
  ShareMode mode_ = ShareMode::room_agnostic;
  std::vector<RoomType> rooms_;
  std::array<std::shared_ptr<Encoder<T>>, 3> by_room_{};
};

// image [-1,1] normalization shared by every model input path
template <class T>
nn::Tensor<T> to_tensor(const synth::Image& img) {
  std::vector<T> data(static_cast<size_t>(img.width) * img.height * img.channels);
  // HWC bytes -> CHW floats
  size_t plane = static_cast<size_t>(img.width) * img.height;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        data[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * img.width + x] =
            static_cast<T>(img.at(x, y, c)) / T(255) * T(2) - T(1);
  return nn::Tensor<T>::from_data({1, img.channels, img.height, img.width}, std::move(data));
}

template <class T>
nn::Tensor<T> to_tensor_batch(const std::vector<synth::Image>& imgs) {
  if (imgs.empty()) throw DimensionError("empty image batch");
  int c = imgs[0].channels, h = imgs[0].height, w = imgs[0].width;
  size_t per = static_cast<size_t>(c) * h * w;
  std::vector<T> data(per * imgs.size());
  size_t plane = static_cast<size_t>(w) * h;
  for (size_t i = 0; i < imgs.size(); ++i) {
    const synth::Image& img = imgs[i];
    if (img.channels != c || img.height != h || img.width != w)
      throw DimensionError("image batch extent mismatch");
    T* dst = data.data() + i * per;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < c; ++ch)
          dst[static_cast<size_t>(ch) * plane + static_cast<size_t>(y) * w + x] =
              static_cast<T>(img.at(x, y, ch)) / T(255) * T(2) - T(1);
  }
  return nn::Tensor<T>::from_data({static_cast<int>(imgs.size()), c, h, w}, std::move(data));
}

}  // namespace floormatch::enc
