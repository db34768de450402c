#include "floormatch/harness/train.hpp"

#include <cmath>
#include <cstdio>

#include "floormatch/match/serialize.hpp"
#include "floormatch/synth/sampler.hpp"

namespace floormatch::harness {

std::unique_ptr<Matcher> build_untrained(const TrainConfig& cfg) {
  auto errors = cfg.problem.validate();
  if (!errors.empty()) throw ConfigError(errors.front());
  Rng init_rng = Rng(cfg.seed).derive("init");
  auto matcher = match::build_matcher<float>(cfg.model, cfg.problem, init_rng);
  matcher->set_freeze_encoders(cfg.freeze_encoders);
  return matcher;
}

TrainResult train(const synth::Dataset& data, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (cfg.margin <= 0.0f) throw ConfigError("train.margin must be positive");
  if (data.train_ids().size() < 2) throw ConfigError("dataset has no usable train split");

  TrainResult result;
  result.seed = cfg.seed;
  result.matcher = build_untrained(cfg);
  Matcher& matcher = *result.matcher;

  nn::Optimizer<float> optimizer(cfg.optimizer, matcher.trainable_parameters());
  Rng root(cfg.seed);

  int per_epoch = cfg.samples_per_epoch > 0 ? cfg.samples_per_epoch
                                            : static_cast<int>(data.train_ids().size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng = root.derive("train-epoch", static_cast<uint64_t>(epoch));
    double epoch_sum = 0.0;
    int done = 0;
    int batch_index = 0;
    while (done < per_epoch) {
      int bs = std::min(cfg.batch_size, per_epoch - done);
      Rng batch_rng = epoch_rng.derive("batch", static_cast<uint64_t>(batch_index));
      uint64_t batch_seed = batch_rng.seed();
      nn::Tensor<float> total;
      for (int i = 0; i < bs; ++i) {
        auto sample = synth::draw_sample(data, data.train_ids(), batch_rng, cfg.problem);
        auto loss = matcher.loss(sample, cfg.margin);
        total = i == 0 ? loss : nn::add(total, loss);
      }
      total = nn::scale(total, 1.0f / static_cast<float>(bs));
      float batch_loss = total.item();
      if (!std::isfinite(batch_loss)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%016llx",
                      static_cast<unsigned long long>(batch_seed));
        throw NumericError(std::string("non-finite training loss in batch with seed ") + buf);
      }
      total.backward();
      optimizer.step();
      epoch_sum += static_cast<double>(batch_loss) * bs;
      done += bs;
      ++batch_index;
    }
    result.epoch_loss.push_back(static_cast<float>(epoch_sum / per_epoch));
  }
  return result;
}

std::string checkpoint_meta(const TrainConfig& cfg) {
  nlohmann::json meta{{"model", match::to_json(cfg.model)},
                      {"problem", match::to_json(cfg.problem)},
                      {"seed", cfg.seed}};
  return meta.dump();
}

void save_matcher(const std::string& path, const Matcher& matcher, const std::string& meta) {
  auto named = matcher.named_parameters();
  nn::save_checkpoint(path, nn::to_checkpoint(named, meta));
}

std::unique_ptr<Matcher> load_matcher(const std::string& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  nlohmann::json meta = nlohmann::json::parse(ck.meta);
  auto model = match::model_config_from_json(meta.at("model"));
  auto problem = match::match_problem_from_json(meta.at("problem"));
  uint64_t seed = meta.at("seed").get<uint64_t>();
  Rng init_rng = Rng(seed).derive("init");
  auto matcher = match::build_matcher<float>(model, problem, init_rng);
  auto named = matcher->named_parameters();
  nn::load_into(ck, named);
  return matcher;
}

}  // namespace floormatch::harness
