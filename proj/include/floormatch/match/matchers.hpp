#pragma once

#include <memory>
#include <string>
#include <vector>

#include "floormatch/enc/encoder.hpp"
#include "floormatch/match/problem.hpp"
#include "floormatch/nn/loss.hpp"
#include "floormatch/synth/sampler.hpp"

namespace floormatch::match {

using synth::Image;
using synth::RoomType;
using synth::Sample;

struct ModelConfig {
  int feature_dim = 64;
  std::vector<std::pair<int, int>> conv_blocks = {{16, 1}, {32, 1}, {64, 1}, {64, 1}};
  float init_sigma = 0.001f;
  int head_hidden = 0;  // 0 -> 2 * feature_dim
  int floorplan_size = 64;
  int floorplan_channels = 1;
  int photo_size = 48;
  int photo_channels = 3;
  bool fc_only_sharing = false;       // room-aware variant with shared conv stacks
  bool untied_score_weights = false;  // score-layer averaging with learned convex weights

  int hidden() const { return head_hidden > 0 ? head_hidden : 2 * feature_dim; }

  enc::EncoderConfig floorplan_encoder_config() const {
    return {floorplan_channels, floorplan_size, floorplan_size, conv_blocks, feature_dim,
            init_sigma};
  }
  enc::EncoderConfig photo_encoder_config() const {
    return {photo_channels, photo_size, photo_size, conv_blocks, feature_dim, init_sigma};
  }
};

// regression head: concat(floorplan D, photo W) -> hidden -> relu -> 1 -> tanh
template <class T>
struct PairHead {
  enc::LinearLayer<T> fc1, fc2;

  PairHead() = default;
  PairHead(int fp_dim, int photo_dim, int hidden, T sigma, Rng& rng)
      : fc1(hidden, fp_dim + photo_dim, sigma, rng), fc2(1, hidden, sigma, rng) {}

  nn::Tensor<T> score(const nn::Tensor<T>& fp_feat, const nn::Tensor<T>& photo_feat) const {
    auto cat = nn::concat<T>({fp_feat, photo_feat}, 1);
    auto h = nn::relu(fc1.forward(cat));
    return nn::tanh(fc2.forward(h));  // [N,1], values in (-1,1)
  }

  void collect(std::vector<nn::NamedParam<T>>& out, const std::string& prefix) const {
    out.push_back({prefix + "fc1.weight", fc1.weight});
    out.push_back({prefix + "fc1.bias", fc1.bias});
    out.push_back({prefix + "fc2.weight", fc2.weight});
    out.push_back({prefix + "fc2.bias", fc2.bias});
  }
};

// Re-scores many floorplans against a fixed photo side; interpretation
// algorithms are built on this.
template <class T>
class FloorplanProbe {
 public:
  virtual ~FloorplanProbe() = default;
  virtual std::vector<T> score(const std::vector<Image>& floorplans) = 0;
};

template <class T>
class MatcherT {
 public:
  virtual ~MatcherT() = default;

  virtual const MatchProblem& problem() const = 0;
  virtual nn::Tensor<T> loss(const Sample& sample, T margin) = 0;

  // pair/set matchers
  virtual T score(const Sample&) {
    throw ConfigError("score() is only defined for pair/set matchers");
  }
  virtual std::unique_ptr<FloorplanProbe<T>> make_probe(const Sample&) {
    throw ConfigError("probes are only defined for pair/set matchers");
  }

  // kway matchers
  virtual std::vector<T> probabilities(const Sample&) {
    throw ConfigError("probabilities() is only defined for kway matchers");
  }

  virtual std::vector<nn::NamedParam<T>> named_parameters() const = 0;
  // optimizer view; honors encoder freezing
  virtual std::vector<nn::Tensor<T>> trainable_parameters() const = 0;
  virtual void set_freeze_encoders(bool frozen) { frozen_encoders_ = frozen; }
  bool encoders_frozen() const { return frozen_encoders_; }

 protected:
  bool frozen_encoders_ = false;
};

namespace detail {

template <class T>
std::vector<nn::Tensor<T>> tensors_of(const std::vector<nn::NamedParam<T>>& named) {
  std::vector<nn::Tensor<T>> out;
  out.reserve(named.size());
  for (const auto& p : named) out.push_back(p.tensor);
  return out;
}

template <class T>
nn::Tensor<T> tile_rows(const nn::Tensor<T>& row, int n) {
  // [1,D] -> [N,D] (constant, no grad path; probe evaluation only)
  int d = row.dim(1);
  std::vector<T> data(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    std::copy(row.data().begin(), row.data().end(), data.begin() + static_cast<size_t>(i) * d);
  return nn::Tensor<T>::from_data({n, d}, std::move(data));
}

inline std::vector<RoomType> rooms_for(const MatchProblem& prob) {
  if (prob.photos_per_apartment == 1) return {*prob.room_type};
  return {RoomType::bathroom, RoomType::kitchen, RoomType::living_room};
}

inline enc::ShareMode share_mode_for(const MatchProblem& prob, const ModelConfig& cfg) {
  if (prob.room_mode == RoomMode::agnostic) return enc::ShareMode::room_agnostic;
  return cfg.fc_only_sharing ? enc::ShareMode::room_aware_fc_only
                             : enc::ShareMode::room_aware_full;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// pair matching
// ---------------------------------------------------------------------------

template <class T>
class PairMatcherT : public MatcherT<T> {
 public:
  PairMatcherT(const ModelConfig& cfg, const MatchProblem& prob, Rng& rng)
      : cfg_(cfg), prob_(prob),
        fp_enc_(cfg.floorplan_encoder_config(), rng),
        photo_bank_(enc::EncoderBank<T>::make(detail::share_mode_for(prob, cfg),
                                              cfg.photo_encoder_config(), rng,
                                              detail::rooms_for(prob))),
        head_(cfg.feature_dim, cfg.feature_dim, cfg.hidden(), static_cast<T>(cfg.init_sigma),
              rng) {
    auto errors = prob.validate();
    if (!errors.empty()) throw ConfigError("invalid problem: " + errors.front());
    if (prob.kind != MatchKind::pair) throw ConfigError("PairMatcher requires kind=pair");
  }

  const MatchProblem& problem() const override { return prob_; }

  nn::Tensor<T> score_tensor(const Sample& sample) {
    if (sample.photos.size() != 1)
      throw DimensionError("pair matcher expects exactly one photo per sample");
    auto fp_feat = fp_enc_.encode(enc::to_tensor<T>(sample.floorplan));
    auto ph_feat =
        photo_bank_.room(sample.photo_rooms[0]).encode(enc::to_tensor<T>(sample.photos[0]));
    return head_.score(fp_feat, ph_feat);
  }

  T score(const Sample& sample) override { return score_tensor(sample).data()[0]; }

  nn::Tensor<T> loss(const Sample& sample, T margin) override {
    return nn::hinge_loss(nn::reshape(score_tensor(sample), {1}), sample.label, margin);
  }

  std::unique_ptr<FloorplanProbe<T>> make_probe(const Sample& sample) override;

  std::vector<nn::NamedParam<T>> named_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    fp_enc_.collect(out, "floorplan.");
    photo_bank_.collect(out, "photo.");
    head_.collect(out, "head.");
    return out;
  }

  std::vector<nn::Tensor<T>> trainable_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    if (!this->frozen_encoders_) {
      fp_enc_.collect(out, "floorplan.");
      photo_bank_.collect(out, "photo.");
    }
    head_.collect(out, "head.");
    return detail::tensors_of(out);
  }

  const enc::Encoder<T>& floorplan_encoder() const { return fp_enc_; }
  const enc::EncoderBank<T>& photo_bank() const { return photo_bank_; }
  const PairHead<T>& head() const { return head_; }

 private:
  ModelConfig cfg_;
  MatchProblem prob_;
  enc::Encoder<T> fp_enc_;
  enc::EncoderBank<T> photo_bank_;
  PairHead<T> head_;
};

// probe with a cached photo feature; shared by pair and non-score set fusion
template <class T>
class FeatureProbe : public FloorplanProbe<T> {
 public:
  FeatureProbe(const enc::Encoder<T>* fp_enc, nn::Tensor<T> photo_feat, const PairHead<T>* head)
      : fp_enc_(fp_enc), photo_feat_(std::move(photo_feat)), head_(head) {}

  std::vector<T> score(const std::vector<Image>& floorplans) override {
    auto fp_feats = fp_enc_->encode(enc::to_tensor_batch<T>(floorplans));
    auto tiled = detail::tile_rows(photo_feat_, fp_feats.dim(0));
    auto s = head_->score(fp_feats, tiled);  // [B,1]
    return std::vector<T>(s.data().begin(), s.data().end());
  }

 private:
  const enc::Encoder<T>* fp_enc_;
  nn::Tensor<T> photo_feat_;
  const PairHead<T>* head_;
};

template <class T>
std::unique_ptr<FloorplanProbe<T>> PairMatcherT<T>::make_probe(const Sample& sample) {
  if (sample.photos.size() != 1)
    throw DimensionError("pair matcher expects exactly one photo per sample");
  auto ph_feat =
      photo_bank_.room(sample.photo_rooms[0]).encode(enc::to_tensor<T>(sample.photos[0]));
  return std::make_unique<FeatureProbe<T>>(&fp_enc_, ph_feat, &head_);
}

// ---------------------------------------------------------------------------
// photograph-set matching over the fusion matrix
// ---------------------------------------------------------------------------

template <class T>
class SetMatcherT : public MatcherT<T> {
 public:
  SetMatcherT(const ModelConfig& cfg, const MatchProblem& prob, Rng& rng)
      : cfg_(cfg), prob_(prob), fp_enc_(cfg.floorplan_encoder_config(), rng) {
    auto errors = prob.validate();
    if (!errors.empty()) throw ConfigError("invalid problem: " + errors.front());
    if (prob.kind != MatchKind::set) throw ConfigError("SetMatcher requires kind=set");
    n_ = prob.photos_per_apartment;
    const FusionSpec& fusion = prob.fusion;
    auto photo_cfg = cfg.photo_encoder_config();
    int d = cfg.feature_dim;
    T sigma = static_cast<T>(cfg.init_sigma);
    auto mode = detail::share_mode_for(prob, cfg);
    auto rooms = detail::rooms_for(prob);

    switch (fusion.layer) {
      case FusionLayer::image: {
        auto image_cfg = photo_cfg;
        if (fusion.func == FusionFunc::concatenation)
          image_cfg.in_channels = n_ * cfg.photo_channels;
        image_enc_ = std::make_shared<enc::Encoder<T>>(image_cfg, rng);
        head_ = PairHead<T>(d, d, cfg.hidden(), sigma, rng);
        break;
      }
      case FusionLayer::conv3:
      case FusionLayer::conv4: {
        tap_block_ = fusion.layer == FusionLayer::conv3 ? 3 : 4;
        if (tap_block_ > static_cast<int>(photo_cfg.blocks.size()))
          throw ConfigError("fusion tap needs at least " + std::to_string(tap_block_) +
                            " conv blocks");
        auto front_cfg = photo_cfg;
        front_cfg.blocks.assign(photo_cfg.blocks.begin(), photo_cfg.blocks.begin() + tap_block_);
        if (mode == enc::ShareMode::room_aware_full) {
          for (RoomType t : rooms)
            fronts_[static_cast<size_t>(t)] = std::make_shared<enc::ConvStack<T>>(front_cfg, rng);
        } else {
          auto shared = std::make_shared<enc::ConvStack<T>>(front_cfg, rng);
          for (RoomType t : rooms) fronts_[static_cast<size_t>(t)] = shared;
        }
        const auto& probe_front = *fronts_[static_cast<size_t>(rooms[0])];
        int tap_ch = probe_front.channels_after(tap_block_);
        auto [th, tw] = probe_front.spatial_after(tap_block_);
        auto tail_cfg = photo_cfg;
        tail_cfg.blocks.assign(photo_cfg.blocks.begin() + tap_block_, photo_cfg.blocks.end());
        tail_cfg.in_channels = fusion.func == FusionFunc::concatenation ? n_ * tap_ch : tap_ch;
        tail_cfg.input_h = th;
        tail_cfg.input_w = tw;
        tail_ = std::make_shared<enc::Encoder<T>>(tail_cfg, rng);
        head_ = PairHead<T>(d, d, cfg.hidden(), sigma, rng);
        break;
      }
      case FusionLayer::fc6: {
        photo_bank_ = enc::EncoderBank<T>::make(mode, photo_cfg, rng, rooms);
        int photo_width = fusion.func == FusionFunc::concatenation ? n_ * d : d;
        head_ = PairHead<T>(d, photo_width, cfg.hidden(), sigma, rng);
        break;
      }
      case FusionLayer::score: {
        photo_bank_ = enc::EncoderBank<T>::make(mode, photo_cfg, rng, rooms);
        if (prob.room_mode == RoomMode::aware) {
          for (RoomType t : rooms)
            score_heads_[static_cast<size_t>(t)] =
                std::make_shared<PairHead<T>>(d, d, cfg.hidden(), sigma, rng);
        } else {
          auto shared = std::make_shared<PairHead<T>>(d, d, cfg.hidden(), sigma, rng);
          for (RoomType t : rooms) score_heads_[static_cast<size_t>(t)] = shared;
        }
        if (fusion.func == FusionFunc::concatenation) {
          score_combiner_ = enc::LinearLayer<T>(1, n_, sigma, rng);
        } else if (cfg.untied_score_weights) {
          score_weights_ = nn::Tensor<T>::param({n_}, std::vector<T>(static_cast<size_t>(n_), T(0)));
        }
        break;
      }
    }
  }

  const MatchProblem& problem() const override { return prob_; }

  nn::Tensor<T> score_tensor(const Sample& sample) {
    if (static_cast<int>(sample.photos.size()) != n_)
      throw DimensionError("set matcher expects " + std::to_string(n_) + " photos, got " +
                           std::to_string(sample.photos.size()));
    auto fp_feat = fp_enc_.encode(enc::to_tensor<T>(sample.floorplan));
    return score_from_photo_side(fp_feat, photo_side(sample));
  }

  T score(const Sample& sample) override { return score_tensor(sample).data()[0]; }

  nn::Tensor<T> loss(const Sample& sample, T margin) override {
    return nn::hinge_loss(nn::reshape(score_tensor(sample), {1}), sample.label, margin);
  }

  std::unique_ptr<FloorplanProbe<T>> make_probe(const Sample& sample) override;

  std::vector<nn::NamedParam<T>> named_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    collect_encoders(out);
    collect_heads(out);
    return out;
  }

  std::vector<nn::Tensor<T>> trainable_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    if (!this->frozen_encoders_) collect_encoders(out);
    collect_heads(out);
    return detail::tensors_of(out);
  }

 private:
  // photo-side state: either a fused feature or per-photo scores-to-be
  struct PhotoSide {
    nn::Tensor<T> fused_feature;                 // non-score fusion
    std::vector<nn::Tensor<T>> photo_features;   // score fusion, per photo
    std::vector<RoomType> rooms;
  };

  PhotoSide photo_side(const Sample& sample) {
    PhotoSide side;
    side.rooms = sample.photo_rooms;
    const FusionSpec& fusion = prob_.fusion;
    switch (fusion.layer) {
      case FusionLayer::image: {
        if (fusion.func == FusionFunc::concatenation) {
          std::vector<nn::Tensor<T>> chans;
          for (const Image& img : sample.photos) chans.push_back(enc::to_tensor<T>(img));
          side.fused_feature = image_enc_->encode(nn::concat<T>(chans, 1));
        } else {
          std::vector<nn::Tensor<T>> imgs;
          for (const Image& img : sample.photos) imgs.push_back(enc::to_tensor<T>(img));
          side.fused_feature = image_enc_->encode(nn::mean_ordered<T>(imgs));
        }
        break;
      }
      case FusionLayer::conv3:
      case FusionLayer::conv4: {
        std::vector<nn::Tensor<T>> maps;
        for (size_t i = 0; i < sample.photos.size(); ++i) {
          const auto& front = *fronts_[static_cast<size_t>(sample.photo_rooms[i])];
          maps.push_back(front.forward(enc::to_tensor<T>(sample.photos[i])));
        }
        auto fused = fusion.func == FusionFunc::concatenation ? nn::concat<T>(maps, 1)
                                                              : nn::mean_ordered<T>(maps);
        side.fused_feature = tail_->encode(fused);
        break;
      }
      case FusionLayer::fc6: {
        std::vector<nn::Tensor<T>> feats;
        for (size_t i = 0; i < sample.photos.size(); ++i)
          feats.push_back(photo_bank_.room(sample.photo_rooms[i])
                              .encode(enc::to_tensor<T>(sample.photos[i])));
        side.fused_feature = fusion.func == FusionFunc::concatenation
                                 ? nn::concat<T>(feats, 1)
                                 : nn::mean_ordered<T>(feats);
        break;
      }
      case FusionLayer::score: {
        for (size_t i = 0; i < sample.photos.size(); ++i)
          side.photo_features.push_back(photo_bank_.room(sample.photo_rooms[i])
                                            .encode(enc::to_tensor<T>(sample.photos[i])));
        break;
      }
    }
    return side;
  }

  nn::Tensor<T> score_from_photo_side(const nn::Tensor<T>& fp_feat, const PhotoSide& side) {
    if (prob_.fusion.layer != FusionLayer::score)
      return head_.score(fp_feat, side.fused_feature);
    std::vector<nn::Tensor<T>> scores;
    for (size_t i = 0; i < side.photo_features.size(); ++i) {
      const auto& head = *score_heads_[static_cast<size_t>(side.rooms[i])];
      scores.push_back(head.score(fp_feat, side.photo_features[i]));  // [1,1]
    }
    return combine_scores(scores);
  }

  void collect_encoders(std::vector<nn::NamedParam<T>>& out) const {
    fp_enc_.collect(out, "floorplan.");
    const FusionSpec& fusion = prob_.fusion;
    if (fusion.layer == FusionLayer::image) {
      image_enc_->collect(out, "photo.image.");
    } else if (fusion.layer == FusionLayer::conv3 || fusion.layer == FusionLayer::conv4) {
      auto rooms = detail::rooms_for(prob_);
      if (prob_.room_mode == RoomMode::aware) {
        for (RoomType t : rooms)
          fronts_[static_cast<size_t>(t)]->collect(out, std::string("photo.front.") +
                                                            synth::to_string(t) + ".");
      } else {
        fronts_[static_cast<size_t>(rooms[0])]->collect(out, "photo.front.shared.");
      }
      tail_->collect(out, "photo.tail.");
    } else {
      photo_bank_.collect(out, "photo.");
    }
  }

  void collect_heads(std::vector<nn::NamedParam<T>>& out) const {
    if (prob_.fusion.layer != FusionLayer::score) {
      head_.collect(out, "head.");
      return;
    }
    auto rooms = detail::rooms_for(prob_);
    if (prob_.room_mode == RoomMode::aware) {
      for (RoomType t : rooms)
        score_heads_[static_cast<size_t>(t)]->collect(out, std::string("head.") +
                                                               synth::to_string(t) + ".");
    } else {
      score_heads_[static_cast<size_t>(rooms[0])]->collect(out, "head.shared.");
    }
    if (score_combiner_.weight.defined()) {
      out.push_back({"combiner.weight", score_combiner_.weight});
      out.push_back({"combiner.bias", score_combiner_.bias});
    }
    if (score_weights_.defined()) out.push_back({"combiner.weights", score_weights_});
  }

  ModelConfig cfg_;
  MatchProblem prob_;
  int n_ = 3;
  int tap_block_ = 0;
  enc::Encoder<T> fp_enc_;
  std::shared_ptr<enc::Encoder<T>> image_enc_;                    // image fusion
  std::array<std::shared_ptr<enc::ConvStack<T>>, 3> fronts_{};    // conv fusion
  std::shared_ptr<enc::Encoder<T>> tail_;                         // conv fusion
  enc::EncoderBank<T> photo_bank_;                                // fc6/score fusion
  PairHead<T> head_;                                              // non-score fusion
  std::array<std::shared_ptr<PairHead<T>>, 3> score_heads_{};     // score fusion
  enc::LinearLayer<T> score_combiner_;                            // score concatenation
  nn::Tensor<T> score_weights_;                                   // score averaging, untied

 public:
  // score-layer combination: tied averaging is an exact (permutation
  // invariant) mean; untied averaging uses learned convex weights;
  // concatenation is a learned layer over the score vector, kept in range
  // by tanh
  nn::Tensor<T> combine_scores(const std::vector<nn::Tensor<T>>& scores) {
    if (prob_.fusion.func == FusionFunc::averaging) {
      if (score_weights_.defined()) {
        auto w = nn::softmax(score_weights_);
        auto cat = nn::reshape(nn::concat<T>(scores, 1), {n_});
        return nn::reshape(nn::sum(nn::mul(w, cat)), {1, 1});
      }
      return nn::mean_ordered<T>(scores);
    }
    auto cat = nn::concat<T>(scores, 1);  // [1,n]
    return nn::tanh(score_combiner_.forward(cat));
  }

  // exposes the photo-side computation for probes
  nn::Tensor<T> fused_photo_feature(const Sample& sample) {
    auto side = photo_side(sample);
    return side.fused_feature;
  }
  std::vector<nn::Tensor<T>> photo_feature_list(const Sample& sample) {
    auto side = photo_side(sample);
    return side.photo_features;
  }
  const enc::Encoder<T>& floorplan_encoder() const { return fp_enc_; }
  const PairHead<T>& head() const { return head_; }
  const PairHead<T>& score_head(RoomType t) const { return *score_heads_[static_cast<size_t>(t)]; }
};

template <class T>
class SetScoreProbe : public FloorplanProbe<T> {
 public:
  SetScoreProbe(SetMatcherT<T>* matcher, const Sample& sample)
      : matcher_(matcher), rooms_(sample.photo_rooms) {
    feats_ = matcher->photo_feature_list(sample);
  }

  std::vector<T> score(const std::vector<Image>& floorplans) override {
    auto fp_feats = matcher_->floorplan_encoder().encode(enc::to_tensor_batch<T>(floorplans));
    int b = fp_feats.dim(0);
    std::vector<nn::Tensor<T>> per_photo;  // each [B,1]
    for (size_t i = 0; i < feats_.size(); ++i) {
      auto tiled = detail::tile_rows(feats_[i], b);
      per_photo.push_back(matcher_->score_head(rooms_[i]).score(fp_feats, tiled));
    }
    // combine per row exactly the way score_tensor does
    std::vector<T> out(static_cast<size_t>(b));
    for (int r = 0; r < b; ++r) {
      std::vector<nn::Tensor<T>> scores;
      for (auto& p : per_photo)
        scores.push_back(nn::Tensor<T>::from_data({1, 1}, {p.data()[static_cast<size_t>(r)]}));
      out[static_cast<size_t>(r)] = matcher_->combine_scores(scores).data()[0];
    }
    return out;
  }

 private:
  SetMatcherT<T>* matcher_;
  std::vector<RoomType> rooms_;
  std::vector<nn::Tensor<T>> feats_;
};

template <class T>
std::unique_ptr<FloorplanProbe<T>> SetMatcherT<T>::make_probe(const Sample& sample) {
  if (static_cast<int>(sample.photos.size()) != n_)
    throw DimensionError("set matcher expects " + std::to_string(n_) + " photos");
  if (prob_.fusion.layer == FusionLayer::score)
    return std::make_unique<SetScoreProbe<T>>(this, sample);
  auto feat = fused_photo_feature(sample);
  return std::make_unique<FeatureProbe<T>>(&fp_enc_, feat, &head_);
}

// ---------------------------------------------------------------------------
// k-way matching
// ---------------------------------------------------------------------------

template <class T>
class KwayMatcherT : public MatcherT<T> {
 public:
  KwayMatcherT(const ModelConfig& cfg, const MatchProblem& prob, Rng& rng)
      : cfg_(cfg), prob_(prob), fp_enc_(cfg.floorplan_encoder_config(), rng) {
    auto errors = prob.validate();
    if (!errors.empty()) throw ConfigError("invalid problem: " + errors.front());
    if (prob.kind != MatchKind::kway) throw ConfigError("KwayMatcher requires kind=kway");
    // candidate photo encoders share weights; room types keep their own
    photo_bank_ = enc::EncoderBank<T>::make(detail::share_mode_for(prob, cfg),
                                            cfg.photo_encoder_config(), rng,
                                            detail::rooms_for(prob));
    int d = cfg.feature_dim;
    int total = d * (1 + prob.k * prob.photos_per_apartment);
    fc1_ = enc::LinearLayer<T>(cfg.hidden(), total, static_cast<T>(cfg.init_sigma), rng);
    fc2_ = enc::LinearLayer<T>(prob.k, cfg.hidden(), static_cast<T>(cfg.init_sigma), rng);
  }

  const MatchProblem& problem() const override { return prob_; }

  nn::Tensor<T> logits(const Sample& sample) {
    int expect = prob_.k * prob_.photos_per_apartment;
    if (static_cast<int>(sample.photos.size()) != expect)
      throw DimensionError("kway matcher expects " + std::to_string(expect) + " photos, got " +
                           std::to_string(sample.photos.size()));
    std::vector<nn::Tensor<T>> feats;
    feats.push_back(fp_enc_.encode(enc::to_tensor<T>(sample.floorplan)));
    for (size_t i = 0; i < sample.photos.size(); ++i)
      feats.push_back(photo_bank_.room(sample.photo_rooms[i])
                          .encode(enc::to_tensor<T>(sample.photos[i])));
    auto cat = nn::concat<T>(feats, 1);
    auto h = nn::relu(fc1_.forward(cat));
    return nn::reshape(fc2_.forward(h), {prob_.k});
  }

  std::vector<T> probabilities(const Sample& sample) override {
    auto p = nn::softmax(logits(sample));
    return std::vector<T>(p.data().begin(), p.data().end());
  }

  nn::Tensor<T> loss(const Sample& sample, T) override {
    return nn::cross_entropy(logits(sample), sample.true_index);
  }

  std::vector<nn::NamedParam<T>> named_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    fp_enc_.collect(out, "floorplan.");
    photo_bank_.collect(out, "photo.");
    out.push_back({"head.fc1.weight", fc1_.weight});
    out.push_back({"head.fc1.bias", fc1_.bias});
    out.push_back({"head.fc2.weight", fc2_.weight});
    out.push_back({"head.fc2.bias", fc2_.bias});
    return out;
  }

  std::vector<nn::Tensor<T>> trainable_parameters() const override {
    std::vector<nn::NamedParam<T>> out;
    if (!this->frozen_encoders_) {
      fp_enc_.collect(out, "floorplan.");
      photo_bank_.collect(out, "photo.");
    }
    out.push_back({"head.fc1.weight", fc1_.weight});
    out.push_back({"head.fc1.bias", fc1_.bias});
    out.push_back({"head.fc2.weight", fc2_.weight});
    out.push_back({"head.fc2.bias", fc2_.bias});
    return detail::tensors_of(out);
  }

 private:
  ModelConfig cfg_;
  MatchProblem prob_;
  enc::Encoder<T> fp_enc_;
  enc::EncoderBank<T> photo_bank_;
  enc::LinearLayer<T> fc1_, fc2_;
};

template <class T>
std::unique_ptr<MatcherT<T>> build_matcher(const ModelConfig& cfg, const MatchProblem& prob,
                                           Rng rng) {
  switch (prob.kind) {
    case MatchKind::pair: return std::make_unique<PairMatcherT<T>>(cfg, prob, rng);
    case MatchKind::set: return std::make_unique<SetMatcherT<T>>(cfg, prob, rng);
    case MatchKind::kway: return std::make_unique<KwayMatcherT<T>>(cfg, prob, rng);
  }
  throw ConfigError("unknown match kind");
}

// ---------------------------------------------------------------------------
// cross-problem solvers
// ---------------------------------------------------------------------------

// Scores each candidate with the pair/set model and picks the argmax;
// ties break to the lowest index.
template <class T>
int solve_kway_with_pair_model(MatcherT<T>& model, const Sample& kway_sample) {
  int m = kway_sample.photos_per_candidate;
  int k = kway_sample.k;
  if (k < 1) throw ConfigError("kway sample must have k >= 1");
  int best = 0;
  T best_score = std::numeric_limits<T>::lowest();
  for (int i = 0; i < k; ++i) {
    Sample sub;
    sub.floorplan = kway_sample.floorplan;
    sub.photos.assign(kway_sample.photos.begin() + static_cast<size_t>(i) * m,
                      kway_sample.photos.begin() + static_cast<size_t>(i + 1) * m);
    sub.photo_rooms.assign(kway_sample.photo_rooms.begin() + static_cast<size_t>(i) * m,
                           kway_sample.photo_rooms.begin() + static_cast<size_t>(i + 1) * m);
    sub.photos_per_candidate = m;
    T s = model.score(sub);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

// Solves a k-way problem with a model trained at K (k divides K) by
// duplicating each candidate into K/k consecutive slots and summing the
// predicted probabilities per candidate; ties break to the lowest index.
template <class T>
int solve_smallk_with_bigk_model(MatcherT<T>& model, const Sample& sample) {
  int big_k = model.problem().k;
  int k = sample.k;
  if (k < 1 || big_k % k != 0)
    throw ConfigError("model k=" + std::to_string(big_k) + " is not divisible by sample k=" +
                      std::to_string(k));
  int dup = big_k / k;
  int m = sample.photos_per_candidate;
  Sample inflated;
  inflated.floorplan = sample.floorplan;
  inflated.k = big_k;
  inflated.photos_per_candidate = m;
  for (int i = 0; i < k; ++i)
    for (int d = 0; d < dup; ++d)
      for (int j = 0; j < m; ++j) {
        inflated.photos.push_back(sample.photos[static_cast<size_t>(i) * m + j]);
        inflated.photo_rooms.push_back(sample.photo_rooms[static_cast<size_t>(i) * m + j]);
      }
  std::vector<T> probs = model.probabilities(inflated);
  int best = 0;
  T best_sum = std::numeric_limits<T>::lowest();
  for (int i = 0; i < k; ++i) {
    T s = 0;
    for (int d = 0; d < dup; ++d) s += probs[static_cast<size_t>(i * dup + d)];
    if (s > best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

}  // namespace floormatch::match
