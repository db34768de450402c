#pragma once

#include <optional>

#include "floormatch/harness/eval.hpp"

namespace floormatch::harness {

struct SweepCell {
  std::string row;
  std::string col;
  EvalReport report;
  std::vector<float> loss_curve;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // fixed order, independent of jobs
};

// Table-2-shaped grid: {image, conv3, conv4, fc6, score} x {averaging,
// concatenation}, every cell trained and evaluated with the same seed and
// budget. base.problem must be a 3-photo set problem.
SweepResult fusion_sweep(const synth::Dataset& data, const TrainConfig& base,
                         const EvalConfig& eval_cfg, int jobs = 1);

// Table-3-shaped column: {frozen_encoders, room_agnostic,
// room_aware_fc_only, room_aware_full} on the 3-photo set problem.
SweepResult finetune_sweep(const synth::Dataset& data, const TrainConfig& base,
                           const EvalConfig& eval_cfg, int jobs = 1);

struct CrossEvalCell {
  std::string trained_on;
  std::string eval_on;
  bool not_applicable = false;
  EvalReport report;
};

struct CrossEvalResult {
  std::vector<CrossEvalCell> cells;  // rows {pair,2,4,8} x cols {2,4,8}
  std::vector<float> pair_loss_curve;
};

// Table-4-shaped matrix: models trained on pair/2/4/8-way bathroom problems
// solve the 2/4/8-way tasks. The pair model scores each candidate; larger-k
// models solve smaller k by input duplication; cells with trained k smaller
// than the evaluated k are N/A.
CrossEvalResult cross_eval(const synth::Dataset& data, const TrainConfig& base,
                           const EvalConfig& eval_cfg, int jobs = 1);

}  // namespace floormatch::harness
