#include "floormatch/harness/eval.hpp"

#include <algorithm>
#include <cmath>

#include "floormatch/synth/sampler.hpp"

namespace floormatch::harness {

namespace {

EvalReport report_from_outcomes(const std::vector<bool>& correct, int groups, double chance,
                                std::string problem_desc) {
  EvalReport rep;
  rep.chance = chance;
  rep.problem = std::move(problem_desc);
  rep.num_samples = static_cast<int>(correct.size());
  int n = rep.num_samples;
  for (int g = 0; g < groups; ++g) {
    int lo = static_cast<int>(static_cast<int64_t>(g) * n / groups);
    int hi = static_cast<int>(static_cast<int64_t>(g + 1) * n / groups);
    int right = 0;
    for (int i = lo; i < hi; ++i) right += correct[static_cast<size_t>(i)] ? 1 : 0;
    rep.group_accuracies.push_back(hi > lo ? 100.0 * right / (hi - lo) : 0.0);
  }
  double mean = 0.0;
  for (double g : rep.group_accuracies) mean += g;
  mean /= groups;
  double var = 0.0;
  for (double g : rep.group_accuracies) var += (g - mean) * (g - mean);
  var /= groups;
  rep.accuracy_mean = mean;
  rep.accuracy_std = std::sqrt(var);
  return rep;
}

void check_eval_config(const EvalConfig& cfg) {
  if (cfg.groups < 1) throw ConfigError("eval.groups must be >= 1");
  if (cfg.num_samples < cfg.groups || cfg.num_samples % cfg.groups != 0)
    throw ConfigError("eval.num_samples must be a positive multiple of eval.groups");
}

}  // namespace

EvalReport evaluate(Matcher& matcher, const synth::Dataset& data,
                    const match::MatchProblem& problem, const EvalConfig& cfg) {
  check_eval_config(cfg);
  // the eval stream is derived from a distinct tag, never overlapping training
  Rng rng = Rng(cfg.seed).derive("eval");
  std::vector<bool> correct;
  correct.reserve(static_cast<size_t>(cfg.num_samples));
  for (int i = 0; i < cfg.num_samples; ++i) {
    auto sample = synth::draw_sample(data, data.test_ids(), rng, problem);
    if (problem.kind == match::MatchKind::kway) {
      auto probs = matcher.probabilities(sample);
      int arg = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
      correct.push_back(arg == sample.true_index);
    } else {
      float s = matcher.score(sample);
      int predicted = s >= 0.0f ? 1 : -1;
      correct.push_back(predicted == sample.label);
    }
  }
  return report_from_outcomes(correct, cfg.groups, problem.chance_percent(), problem.describe());
}

EvalReport evaluate_kway_predictor(const synth::Dataset& data,
                                   const match::MatchProblem& problem, const EvalConfig& cfg,
                                   const std::function<int(const synth::Sample&)>& predict) {
  check_eval_config(cfg);
  if (problem.kind != match::MatchKind::kway)
    throw ConfigError("evaluate_kway_predictor expects a kway problem");
  Rng rng = Rng(cfg.seed).derive("eval");
  std::vector<bool> correct;
  correct.reserve(static_cast<size_t>(cfg.num_samples));
  for (int i = 0; i < cfg.num_samples; ++i) {
    auto sample = synth::draw_sample(data, data.test_ids(), rng, problem);
    correct.push_back(predict(sample) == sample.true_index);
  }
  return report_from_outcomes(correct, cfg.groups, problem.chance_percent(), problem.describe());
}

}  // namespace floormatch::harness
