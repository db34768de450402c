#pragma once

#include <json.hpp>

#include "floormatch/match/matchers.hpp"

namespace floormatch::match {

// JSON forms of the model/problem descriptors; used by the config file
// schema and embedded as checkpoint metadata so a checkpoint is
// self-describing.

inline nlohmann::json to_json(const ModelConfig& m) {
  nlohmann::json blocks = nlohmann::json::array();
  for (auto [ch, n] : m.conv_blocks) blocks.push_back({ch, n});
  return {{"feature_dim", m.feature_dim},
          {"conv_blocks", blocks},
          {"init_sigma", m.init_sigma},
          {"head_hidden", m.head_hidden},
          {"floorplan_size", m.floorplan_size},
          {"floorplan_channels", m.floorplan_channels},
          {"photo_size", m.photo_size},
          {"photo_channels", m.photo_channels},
          {"fc_only_sharing", m.fc_only_sharing},
          {"untied_score_weights", m.untied_score_weights}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig m;
  m.feature_dim = j.at("feature_dim").get<int>();
  m.conv_blocks.clear();
  for (const auto& b : j.at("conv_blocks"))
    m.conv_blocks.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
  m.init_sigma = j.at("init_sigma").get<float>();
  m.head_hidden = j.at("head_hidden").get<int>();
  m.floorplan_size = j.at("floorplan_size").get<int>();
  m.floorplan_channels = j.at("floorplan_channels").get<int>();
  m.photo_size = j.at("photo_size").get<int>();
  m.photo_channels = j.at("photo_channels").get<int>();
  m.fc_only_sharing = j.at("fc_only_sharing").get<bool>();
  m.untied_score_weights = j.at("untied_score_weights").get<bool>();
  return m;
}

inline nlohmann::json to_json(const MatchProblem& p) {
  nlohmann::json j{{"kind", to_string(p.kind)},
                   {"k", p.k},
                   {"photos_per_apartment", p.photos_per_apartment},
                   {"room_mode", to_string(p.room_mode)},
                   {"fusion", {{"layer", to_string(p.fusion.layer)},
                               {"func", to_string(p.fusion.func)}}}};
  j["room_type"] = p.room_type ? nlohmann::json(synth::to_string(*p.room_type))
                               : nlohmann::json(nullptr);
  return j;
}

inline MatchProblem match_problem_from_json(const nlohmann::json& j) {
  MatchProblem p;
  auto kind = match_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw ConfigError("problem.kind: unknown value '" + j.at("kind").get<std::string>() + "'");
  p.kind = *kind;
  p.k = j.at("k").get<int>();
  p.photos_per_apartment = j.at("photos_per_apartment").get<int>();
  auto mode = room_mode_from_string(j.at("room_mode").get<std::string>());
  if (!mode) throw ConfigError("problem.room_mode: unknown value");
  p.room_mode = *mode;
  if (!j.at("room_type").is_null()) {
    auto rt = synth::room_type_from_string(j.at("room_type").get<std::string>());
    if (!rt) throw ConfigError("problem.room_type: unknown value");
    p.room_type = rt;
  }
  auto layer = fusion_layer_from_string(j.at("fusion").at("layer").get<std::string>());
  auto func = fusion_func_from_string(j.at("fusion").at("func").get<std::string>());
  if (!layer || !func) throw ConfigError("problem.fusion: unknown layer or func");
  p.fusion = {*layer, *func};
  return p;
}

}  // namespace floormatch::match
