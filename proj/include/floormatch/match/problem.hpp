#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floormatch/synth/apartment.hpp"

namespace floormatch::match {

enum class MatchKind { pair, set, kway };
enum class RoomMode { aware, agnostic };
enum class FusionLayer { image, conv3, conv4, fc6, score };
enum class FusionFunc { averaging, concatenation };

const char* to_string(MatchKind k);
const char* to_string(RoomMode m);
const char* to_string(FusionLayer l);
const char* to_string(FusionFunc f);
std::optional<MatchKind> match_kind_from_string(const std::string& s);
std::optional<RoomMode> room_mode_from_string(const std::string& s);
std::optional<FusionLayer> fusion_layer_from_string(const std::string& s);
std::optional<FusionFunc> fusion_func_from_string(const std::string& s);

struct FusionSpec {
  FusionLayer layer = FusionLayer::fc6;
  FusionFunc func = FusionFunc::concatenation;

  bool operator==(const FusionSpec&) const = default;
};

// Task descriptor for the three matching problems.
struct MatchProblem {
  MatchKind kind = MatchKind::pair;
  int k = 1;                       // number of candidate apartments (kway)
  int photos_per_apartment = 1;    // 1 or 3
  RoomMode room_mode = RoomMode::aware;
  std::optional<synth::RoomType> room_type;  // required when photos_per_apartment == 1
  FusionSpec fusion;               // set kind only

  // returns an error list; empty means valid
  std::vector<std::string> validate() const;
  double chance_percent() const;  // 50 for pair/set, 100/k for kway
  std::string describe() const;
};

}  // namespace floormatch::match
