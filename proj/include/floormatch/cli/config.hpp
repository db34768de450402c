#pragma once

#include <string>
#include <vector>

#include "floormatch/harness/sweeps.hpp"
#include "floormatch/interpret/interpret.hpp"

namespace floormatch::cli {

// One structured config shared by every subcommand, with per-subcommand
// sections. Flags override config values; config overrides defaults.
struct CliConfig {
  uint64_t seed = 1;

  // dataset section
  std::string dataset_dir = "dataset";
  int apartments = 2500;
  double train_fraction = 0.8;
  synth::GeneratorSpec generator;

  match::ModelConfig model;
  match::MatchProblem problem;

  // train section
  int epochs = 20;
  int batch_size = 16;
  int samples_per_epoch = 0;
  std::string optimizer = "adam";
  float learning_rate = 1e-4f;
  float momentum = 0.9f;
  float margin = 1.0f;
  bool freeze_encoders = false;

  // eval section
  int eval_samples = 500;
  int eval_groups = 5;

  std::string checkpoint = "checkpoint.fmck";

  // interpretation section
  uint64_t apartment_id = 0;
  interp::RfConfig rf;
  float localize_retention = 0.8f;
  int retrieve_top_n = 6;

  harness::TrainConfig train_config() const;
  harness::EvalConfig eval_config() const;
};

struct ValidatedConfig {
  CliConfig config;
  std::vector<std::string> errors;  // empty means valid
  bool ok() const { return errors.empty(); }
};

// Side-effect-free: parses, fills defaults, and reports every violation with
// field name and reason. An empty or missing file reports the required
// sections.
ValidatedConfig validate_config(const std::string& path);
ValidatedConfig validate_config_json(const std::string& text);

std::string serialize_config(const CliConfig& config);  // normalized JSON

}  // namespace floormatch::cli
