#include <doctest.h>

#include <cmath>

#include "floormatch/enc/encoder.hpp"
#include "floormatch/nn/gradcheck.hpp"

using namespace floormatch;
using namespace floormatch::enc;

namespace {

EncoderConfig tiny_cfg() {
  EncoderConfig cfg;
  cfg.in_channels = 3;
  cfg.input_h = 16;
  cfg.input_w = 16;
  cfg.blocks = {{4, 1}, {8, 1}};
  cfg.feature_dim = 8;
  cfg.init_sigma = 0.05f;
  return cfg;
}

template <class T>
std::vector<nn::NamedParam<T>> params_of(const Encoder<T>& e) {
  std::vector<nn::NamedParam<T>> out;
  e.collect(out, "");
  return out;
}

synth::Image random_image(Rng& rng, int size, int channels) {
  synth::Image img(size, size, channels);
  for (auto& p : img.pixels) p = static_cast<uint8_t>(rng.uniform_int(256));
  return img;
}

}  // namespace

TEST_CASE("same seed builds identical encoders") {
  auto cfg = tiny_cfg();
  Rng r1(5), r2(5);
  Encoder<float> a(cfg, r1), b(cfg, r2);
  auto pa = params_of(a), pb = params_of(b);
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].name == pb[i].name);
    auto da = pa[i].tensor.data(), db = pb[i].tensor.data();
    for (size_t j = 0; j < da.size(); ++j) CHECK(da[j] == db[j]);
  }
}

TEST_CASE("initialization statistics match the gaussian spec") {
  EncoderConfig cfg;
  cfg.in_channels = 3;
  cfg.input_h = 32;
  cfg.input_w = 32;
  cfg.blocks = {{16, 1}, {32, 1}};
  cfg.feature_dim = 64;
  cfg.init_sigma = 0.001f;
  Rng rng(7);
  Encoder<float> e(cfg, rng);
  std::vector<float> weights;
  for (const auto& p : params_of(e)) {
    if (p.name.find("weight") == std::string::npos) {
      for (float v : p.tensor.data()) CHECK(v == 0.0f);  // biases zero
      continue;
    }
    for (float v : p.tensor.data()) weights.push_back(v);
  }
  REQUIRE(weights.size() >= 10000);
  double mean = 0;
  for (float v : weights) mean += v;
  mean /= static_cast<double>(weights.size());
  double var = 0;
  for (float v : weights) var += (v - mean) * (v - mean);
  var /= static_cast<double>(weights.size());
  double stddev = std::sqrt(var);
  CHECK(std::abs(mean) < 1e-4);
  CHECK(stddev > 0.0009);
  CHECK(stddev < 0.0011);
}

TEST_CASE("encode shape contract and identical rows for identical images") {
  auto cfg = tiny_cfg();
  Rng rng(9);
  Encoder<float> e(cfg, rng);
  Rng img_rng(1);
  auto img = random_image(img_rng, 16, 3);
  auto batch = enc::to_tensor_batch<float>({img, img});
  auto feat = e.encode(batch);
  REQUIRE(feat.shape() == nn::Shape{2, 8});
  for (int j = 0; j < 8; ++j) CHECK(feat.at({0, j}) == feat.at({1, j}));
}

TEST_CASE("tap shapes follow the config arithmetic") {
  // default-style config: 48x48 photo through (16,32,64,64) blocks
  EncoderConfig cfg;
  cfg.in_channels = 3;
  cfg.input_h = 48;
  cfg.input_w = 48;
  cfg.blocks = {{16, 1}, {32, 1}, {64, 1}, {64, 1}};
  cfg.feature_dim = 64;
  cfg.init_sigma = 0.01f;
  Rng rng(11);
  Encoder<float> e(cfg, rng);
  Rng img_rng(2);
  auto img = random_image(img_rng, 48, 3);
  auto taps = e.encode_with_taps(enc::to_tensor<float>(img));
  // hand-computed table: 48 -> 24 -> 12 -> 6 -> 3
  REQUIRE(taps.block_outputs.size() == 4);
  CHECK(taps.block_outputs[0].shape() == nn::Shape{1, 16, 24, 24});
  CHECK(taps.block_outputs[1].shape() == nn::Shape{1, 32, 12, 12});
  CHECK(taps.block_outputs[2].shape() == nn::Shape{1, 64, 6, 6});
  CHECK(taps.block_outputs[3].shape() == nn::Shape{1, 64, 3, 3});
  CHECK(taps.feature.shape() == nn::Shape{1, 64});

  // taps come from the same pass: recomputing the feature from the last tap
  // is bit-identical
  auto feat2 = e.feature_from_maps(taps.block_outputs[3]);
  for (int j = 0; j < 64; ++j) CHECK(feat2.at({0, j}) == taps.feature.at({0, j}));
}

TEST_CASE("config underflow is rejected") {
  EncoderConfig cfg;
  cfg.in_channels = 1;
  cfg.input_h = 8;
  cfg.input_w = 8;
  cfg.blocks = {{4, 1}, {4, 1}, {4, 1}, {4, 1}};  // 8 -> 4 -> 2 -> 1 -> underflow
  cfg.feature_dim = 4;
  Rng rng(3);
  CHECK_THROWS_AS((Encoder<float>(cfg, rng)), ConfigError);
}

TEST_CASE("room-agnostic bank aliases one parameter set") {
  auto cfg = tiny_cfg();
  Rng rng(13);
  auto rooms = std::vector<RoomType>{RoomType::bathroom, RoomType::kitchen,
                                     RoomType::living_room};
  auto bank = EncoderBank<float>::make(ShareMode::room_agnostic, cfg, rng, rooms);
  // updating via one entry is visible through all entries
  std::vector<nn::NamedParam<float>> named;
  bank.collect(named, "photo.");
  for (const auto& p : named) CHECK(p.name.rfind("photo.shared.", 0) == 0);

  Rng img_rng(4);
  auto img = random_image(img_rng, 16, 3);
  auto before = bank.room(RoomType::kitchen).encode(enc::to_tensor<float>(img));
  // mutate through the bathroom entry's parameters
  std::vector<nn::NamedParam<float>> bath;
  bank.room(RoomType::bathroom).collect(bath, "");
  for (auto& p : bath)
    for (auto& v : p.tensor.data()) v += 0.01f;
  auto after = bank.room(RoomType::kitchen).encode(enc::to_tensor<float>(img));
  bool changed = false;
  for (int j = 0; j < 8; ++j)
    if (before.at({0, j}) != after.at({0, j})) changed = true;
  CHECK(changed);
}

TEST_CASE("room-aware bank has 3x parameters and diverges after disjoint updates") {
  auto cfg = tiny_cfg();
  Rng rng(17);
  auto rooms = std::vector<RoomType>{RoomType::bathroom, RoomType::kitchen,
                                     RoomType::living_room};
  auto aware = EncoderBank<float>::make(ShareMode::room_aware_full, cfg, rng, rooms);
  Rng rng2(17);
  auto agnostic = EncoderBank<float>::make(ShareMode::room_agnostic, cfg, rng2, rooms);

  auto count = [](const auto& bank) {
    std::vector<nn::NamedParam<float>> named;
    bank.collect(named, "");
    int64_t total = 0;
    for (const auto& p : named) total += p.tensor.size();
    return total;
  };
  CHECK(count(aware) == 3 * count(agnostic));

  // one gradient step on bathroom only: encoders now disagree on the same image
  Rng img_rng(5);
  auto img = random_image(img_rng, 16, 3);
  std::vector<nn::NamedParam<float>> bath;
  aware.room(RoomType::bathroom).collect(bath, "");
  for (auto& p : bath)
    for (auto& v : p.tensor.data()) v += 0.05f;
  auto fb = aware.room(RoomType::bathroom).encode(enc::to_tensor<float>(img));
  auto fk = aware.room(RoomType::kitchen).encode(enc::to_tensor<float>(img));
  bool differ = false;
  for (int j = 0; j < 8; ++j)
    if (fb.at({0, j}) != fk.at({0, j})) differ = true;
  CHECK(differ);
}

TEST_CASE("fc-only sharing: one conv stack, per-room fc") {
  auto cfg = tiny_cfg();
  Rng rng(19);
  auto rooms = std::vector<RoomType>{RoomType::bathroom, RoomType::kitchen,
                                     RoomType::living_room};
  auto bank = EncoderBank<float>::make(ShareMode::room_aware_fc_only, cfg, rng, rooms);
  CHECK(bank.room(RoomType::bathroom).stack() == bank.room(RoomType::kitchen).stack());
  std::vector<nn::NamedParam<float>> named;
  bank.collect(named, "photo.");
  int stacks = 0, fcs = 0;
  for (const auto& p : named) {
    if (p.name.rfind("photo.shared_conv.", 0) == 0) ++stacks;
    if (p.name.find(".fc.") != std::string::npos) ++fcs;
  }
  CHECK(stacks > 0);
  CHECK(fcs == 6);  // weight+bias per room
}

TEST_CASE("end-to-end differentiability of encode (64-bit)") {
  EncoderConfig cfg;
  cfg.in_channels = 2;
  cfg.input_h = 8;
  cfg.input_w = 8;
  cfg.blocks = {{3, 1}, {4, 1}};
  cfg.feature_dim = 5;
  cfg.init_sigma = 0.2f;
  Rng rng(23);
  Encoder<double> e(cfg, rng);
  Rng img_rng(6);
  std::vector<double> img_data(2 * 8 * 8);
  for (auto& v : img_data) v = img_rng.normal(0.0, 0.8);
  auto x = nn::Tensor<double>::param({1, 2, 8, 8}, img_data);
  auto wsum = nn::Tensor<double>::from_data({5}, {0.3, -0.2, 0.5, 0.1, -0.4});
  auto f = [&] {
    auto feat = nn::reshape(e.encode(x), {5});
    return nn::sum(nn::mul(feat, wsum));
  };
  auto res = nn::finite_diff_check_full<double>(f, x, 1e-5, true);
  CHECK(res.max_rel_err < 1e-5);

  std::vector<nn::NamedParam<double>> named;
  e.collect(named, "");
  for (auto& p : named) {
    auto r = nn::finite_diff_check_full<double>(f, p.tensor, 1e-5, true);
    CHECK(r.max_rel_err < 1e-5);
  }
}
