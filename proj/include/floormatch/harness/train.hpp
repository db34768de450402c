#pragma once

#include <memory>

#include "floormatch/match/matchers.hpp"
#include "floormatch/nn/optim.hpp"
#include "floormatch/synth/dataset.hpp"

namespace floormatch::harness {

using Matcher = match::MatcherT<float>;

struct TrainConfig {
  int epochs = 20;
  int batch_size = 16;
  int samples_per_epoch = 0;  // 0 -> one sample per train apartment
  nn::OptimizerConfig<float> optimizer;  // adam, lr 1e-4 by default
  float margin = 1.0f;
  uint64_t seed = 1;
  bool freeze_encoders = false;
  match::MatchProblem problem;
  match::ModelConfig model;
};

struct TrainResult {
  std::unique_ptr<Matcher> matcher;
  std::vector<float> epoch_loss;  // mean training loss per epoch
  uint64_t seed = 0;
};

// Deterministic training loop: the model init, the per-epoch sampling
// streams and the batch order all derive from config.seed. A non-finite
// loss aborts with a NumericError naming the offending batch seed.
TrainResult train(const synth::Dataset& data, const TrainConfig& cfg);

// Builds an untrained matcher exactly the way train() would before its
// first step (used for chance-level baselines).
std::unique_ptr<Matcher> build_untrained(const TrainConfig& cfg);

std::string checkpoint_meta(const TrainConfig& cfg);
void save_matcher(const std::string& path, const Matcher& matcher, const std::string& meta);
// Rebuilds a matcher from a checkpoint's embedded meta and loads weights.
std::unique_ptr<Matcher> load_matcher(const std::string& path);

}  // namespace floormatch::harness
