#include "floormatch/cli/config.hpp"

#include <json.hpp>

#include <fstream>

#include "floormatch/match/serialize.hpp"

namespace floormatch::cli {

using nlohmann::json;

harness::TrainConfig CliConfig::train_config() const {
  harness::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.samples_per_epoch = samples_per_epoch;
  cfg.optimizer.kind = optimizer == "sgd_momentum" ? nn::OptimizerKind::sgd_momentum
                                                   : nn::OptimizerKind::adam;
  cfg.optimizer.learning_rate = learning_rate;
  cfg.optimizer.momentum = momentum;
  cfg.margin = margin;
  cfg.seed = seed;
  cfg.freeze_encoders = freeze_encoders;
  cfg.problem = problem;
  cfg.model = model;
  return cfg;
}

harness::EvalConfig CliConfig::eval_config() const {
  harness::EvalConfig cfg;
  cfg.num_samples = eval_samples;
  cfg.groups = eval_groups;
  cfg.seed = seed;
  return cfg;
}

namespace {

template <class T>
void read_field(const json& j, const char* name, T& out, std::vector<std::string>& errors,
                const std::string& section) {
  if (!j.contains(name)) return;
  try {
    j.at(name).get_to(out);
  } catch (const json::exception&) {
    errors.push_back(section + "." + name + ": wrong type");
  }
}

}  // namespace

ValidatedConfig validate_config_json(const std::string& text) {
  ValidatedConfig out;
  CliConfig& cfg = out.config;
  auto& errors = out.errors;

  json j;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) {
    j = json::object();
  } else {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      errors.push_back(std::string("config: not valid JSON (") + e.what() + ")");
      return out;
    }
  }
  if (!j.is_object()) {
    errors.push_back("config: top level must be a JSON object");
    return out;
  }

  if (!j.contains("dataset")) errors.push_back("dataset: required section missing");

  read_field(j, "seed", cfg.seed, errors, "config");
  read_field(j, "checkpoint", cfg.checkpoint, errors, "config");

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    if (!d.contains("apartments")) errors.push_back("dataset.apartments: required field missing");
    read_field(d, "dir", cfg.dataset_dir, errors, "dataset");
    read_field(d, "apartments", cfg.apartments, errors, "dataset");
    read_field(d, "train_fraction", cfg.train_fraction, errors, "dataset");
    read_field(d, "floorplan_size", cfg.generator.floorplan_size, errors, "dataset");
    read_field(d, "photo_size", cfg.generator.photo_size, errors, "dataset");
    read_field(d, "object_probability", cfg.generator.object_probability, errors, "dataset");
    read_field(d, "noise_level", cfg.generator.noise_level, errors, "dataset");
    read_field(d, "warp_strength", cfg.generator.warp_strength, errors, "dataset");
  }

  if (j.contains("model")) {
    const json& m = j.at("model");
    read_field(m, "feature_dim", cfg.model.feature_dim, errors, "model");
    read_field(m, "init_sigma", cfg.model.init_sigma, errors, "model");
    read_field(m, "head_hidden", cfg.model.head_hidden, errors, "model");
    read_field(m, "fc_only_sharing", cfg.model.fc_only_sharing, errors, "model");
    read_field(m, "untied_score_weights", cfg.model.untied_score_weights, errors, "model");
    if (m.contains("conv_blocks")) {
      try {
        cfg.model.conv_blocks.clear();
        for (const auto& b : m.at("conv_blocks"))
          cfg.model.conv_blocks.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
      } catch (const json::exception&) {
        errors.push_back("model.conv_blocks: expected a list of [channels, n_convs] pairs");
      }
    }
  }

  if (j.contains("problem")) {
    const json& p = j.at("problem");
    if (p.contains("kind")) {
      auto kind = match::match_kind_from_string(p.at("kind").get<std::string>());
      if (kind)
        cfg.problem.kind = *kind;
      else
        errors.push_back("problem.kind: must be pair, set or kway");
    }
    read_field(p, "k", cfg.problem.k, errors, "problem");
    read_field(p, "photos_per_apartment", cfg.problem.photos_per_apartment, errors, "problem");
    if (p.contains("room_mode")) {
      auto mode = match::room_mode_from_string(p.at("room_mode").get<std::string>());
      if (mode)
        cfg.problem.room_mode = *mode;
      else
        errors.push_back("problem.room_mode: must be aware or agnostic");
    }
    if (p.contains("room_type")) {
      if (p.at("room_type").is_null()) {
        cfg.problem.room_type.reset();
      } else {
        auto rt = synth::room_type_from_string(p.at("room_type").get<std::string>());
        if (rt)
          cfg.problem.room_type = rt;
        else
          errors.push_back("problem.room_type: must be bathroom, kitchen or living_room");
      }
    }
    if (p.contains("fusion")) {
      const json& f = p.at("fusion");
      if (f.contains("layer")) {
        auto layer = match::fusion_layer_from_string(f.at("layer").get<std::string>());
        if (layer)
          cfg.problem.fusion.layer = *layer;
        else
          errors.push_back("problem.fusion.layer: must be image, conv3, conv4, fc6 or score");
      }
      if (f.contains("func")) {
        auto func = match::fusion_func_from_string(f.at("func").get<std::string>());
        if (func)
          cfg.problem.fusion.func = *func;
        else
          errors.push_back("problem.fusion.func: must be averaging or concatenation");
      }
    }
  } else {
    // a single-photo default problem needs a room type
    cfg.problem.room_type = synth::RoomType::bathroom;
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    read_field(t, "epochs", cfg.epochs, errors, "train");
    read_field(t, "batch_size", cfg.batch_size, errors, "train");
    read_field(t, "samples_per_epoch", cfg.samples_per_epoch, errors, "train");
    read_field(t, "learning_rate", cfg.learning_rate, errors, "train");
    read_field(t, "momentum", cfg.momentum, errors, "train");
    read_field(t, "margin", cfg.margin, errors, "train");
    read_field(t, "freeze_encoders", cfg.freeze_encoders, errors, "train");
    if (t.contains("optimizer")) {
      std::string opt = t.at("optimizer").get<std::string>();
      if (opt != "adam" && opt != "sgd_momentum")
        errors.push_back("train.optimizer: must be adam or sgd_momentum");
      else
        cfg.optimizer = opt;
    }
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    read_field(e, "num_samples", cfg.eval_samples, errors, "eval");
    read_field(e, "groups", cfg.eval_groups, errors, "eval");
  }

  if (j.contains("interpret")) {
    const json& i = j.at("interpret");
    read_field(i, "apartment_id", cfg.apartment_id, errors, "interpret");
    read_field(i, "window", cfg.rf.window, errors, "interpret");
    read_field(i, "stride", cfg.rf.stride, errors, "interpret");
    read_field(i, "samples_per_window", cfg.rf.samples_per_window, errors, "interpret");
    read_field(i, "noise_sigma", cfg.rf.noise_sigma, errors, "interpret");
    read_field(i, "batch", cfg.rf.batch, errors, "interpret");
    read_field(i, "localize_retention", cfg.localize_retention, errors, "interpret");
    read_field(i, "retrieve_top_n", cfg.retrieve_top_n, errors, "interpret");
  }

  // model raster geometry always follows the dataset spec
  cfg.model.floorplan_size = cfg.generator.floorplan_size;
  cfg.model.photo_size = cfg.generator.photo_size;
  cfg.rf.seed = cfg.seed;

  // cross-field invariants
  if (cfg.apartments < 2) errors.push_back("dataset.apartments: must be >= 2");
  if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0)
    errors.push_back("dataset.train_fraction: must be in (0,1)");
  if (cfg.epochs < 1) errors.push_back("train.epochs: must be >= 1");
  if (cfg.batch_size < 1) errors.push_back("train.batch_size: must be >= 1");
  if (cfg.margin <= 0.0f) errors.push_back("train.margin: must be positive");
  if (cfg.learning_rate <= 0.0f) errors.push_back("train.learning_rate: must be positive");
  if (cfg.eval_groups < 1) errors.push_back("eval.groups: must be >= 1");
  if (cfg.eval_samples < cfg.eval_groups || cfg.eval_samples % cfg.eval_groups != 0)
    errors.push_back("eval.num_samples: must be a positive multiple of eval.groups");
  if (cfg.rf.window < 1 || cfg.rf.window % 2 == 0)
    errors.push_back("interpret.window: must be a positive odd integer");
  if (cfg.rf.stride < 1) errors.push_back("interpret.stride: must be >= 1");
  if (cfg.rf.samples_per_window < 1)
    errors.push_back("interpret.samples_per_window: must be >= 1");
  for (const std::string& e : cfg.problem.validate()) errors.push_back(e);

  return out;
}

ValidatedConfig validate_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    ValidatedConfig out;
    out.errors.push_back("config: cannot read file '" + path + "'");
    return out;
  }
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return validate_config_json(text);
}

std::string serialize_config(const CliConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["checkpoint"] = cfg.checkpoint;
  j["dataset"] = {{"dir", cfg.dataset_dir},
                  {"apartments", cfg.apartments},
                  {"train_fraction", cfg.train_fraction},
                  {"floorplan_size", cfg.generator.floorplan_size},
                  {"photo_size", cfg.generator.photo_size},
                  {"object_probability", cfg.generator.object_probability},
                  {"noise_level", cfg.generator.noise_level},
                  {"warp_strength", cfg.generator.warp_strength}};
  json model = match::to_json(cfg.model);
  model.erase("floorplan_size");
  model.erase("photo_size");
  model.erase("floorplan_channels");
  model.erase("photo_channels");
  j["model"] = model;
  j["problem"] = match::to_json(cfg.problem);
  j["train"] = {{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"samples_per_epoch", cfg.samples_per_epoch},
                {"optimizer", cfg.optimizer},
                {"learning_rate", cfg.learning_rate},
                {"momentum", cfg.momentum},
                {"margin", cfg.margin},
                {"freeze_encoders", cfg.freeze_encoders}};
  j["eval"] = {{"num_samples", cfg.eval_samples}, {"groups", cfg.eval_groups}};
  j["interpret"] = {{"apartment_id", cfg.apartment_id},
                    {"window", cfg.rf.window},
                    {"stride", cfg.rf.stride},
                    {"samples_per_window", cfg.rf.samples_per_window},
                    {"noise_sigma", cfg.rf.noise_sigma},
                    {"batch", cfg.rf.batch},
                    {"localize_retention", cfg.localize_retention},
                    {"retrieve_top_n", cfg.retrieve_top_n}};
  return j.dump(2);
}

}  // namespace floormatch::cli
