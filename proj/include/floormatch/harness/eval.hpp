#pragma once

#include <functional>
#include <string>
#include <vector>

#include "floormatch/harness/train.hpp"

namespace floormatch::harness {

struct EvalConfig {
  int num_samples = 500;
  int groups = 5;
  uint64_t seed = 1;
};

// Accuracy over the test split, reported the Table-1 way: the test samples
// are divided into `groups` consecutive groups (first 20% is group 1, ...),
// mean is the average of the group accuracies and std the population
// standard deviation across them.
struct EvalReport {
  double accuracy_mean = 0.0;  // percent
  double accuracy_std = 0.0;   // percent
  std::vector<double> group_accuracies;
  double chance = 0.0;         // percent
  std::string problem;
  int num_samples = 0;
};

EvalReport evaluate(Matcher& matcher, const synth::Dataset& data,
                    const match::MatchProblem& problem, const EvalConfig& cfg);

// Evaluates a k-way task solved by an arbitrary predictor (pair-model
// argmax, duplication solver, ...). The sampling stream matches evaluate()
// for the same problem and seed.
EvalReport evaluate_kway_predictor(const synth::Dataset& data,
                                   const match::MatchProblem& problem, const EvalConfig& cfg,
                                   const std::function<int(const synth::Sample&)>& predict);

}  // namespace floormatch::harness
