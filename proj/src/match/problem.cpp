#include "floormatch/match/problem.hpp"

#include <sstream>

namespace floormatch::match {

const char* to_string(MatchKind k) {
  switch (k) {
    case MatchKind::pair: return "pair";
    case MatchKind::set: return "set";
    case MatchKind::kway: return "kway";
  }
  return "?";
}

const char* to_string(RoomMode m) { return m == RoomMode::aware ? "aware" : "agnostic"; }

const char* to_string(FusionLayer l) {
  switch (l) {
    case FusionLayer::image: return "image";
    case FusionLayer::conv3: return "conv3";
    case FusionLayer::conv4: return "conv4";
    case FusionLayer::fc6: return "fc6";
    case FusionLayer::score: return "score";
  }
  return "?";
}

const char* to_string(FusionFunc f) {
  return f == FusionFunc::averaging ? "averaging" : "concatenation";
}

std::optional<MatchKind> match_kind_from_string(const std::string& s) {
  for (MatchKind k : {MatchKind::pair, MatchKind::set, MatchKind::kway})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

std::optional<RoomMode> room_mode_from_string(const std::string& s) {
  for (RoomMode m : {RoomMode::aware, RoomMode::agnostic})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::optional<FusionLayer> fusion_layer_from_string(const std::string& s) {
  for (FusionLayer l : {FusionLayer::image, FusionLayer::conv3, FusionLayer::conv4,
                        FusionLayer::fc6, FusionLayer::score})
    if (s == to_string(l)) return l;
  return std::nullopt;
}

std::optional<FusionFunc> fusion_func_from_string(const std::string& s) {
  for (FusionFunc f : {FusionFunc::averaging, FusionFunc::concatenation})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

std::vector<std::string> MatchProblem::validate() const {
  std::vector<std::string> errors;
  if (photos_per_apartment != 1 && photos_per_apartment != 3)
    errors.push_back("problem.photos_per_apartment: must be 1 or 3");
  if (kind == MatchKind::pair && k != 1)
    errors.push_back("problem.k: pair matching requires k = 1");
  if (kind == MatchKind::set && k != 1)
    errors.push_back("problem.k: set matching requires k = 1");
  if (kind == MatchKind::kway && k < 2)
    errors.push_back("problem.k: kway matching requires k >= 2");
  if (kind == MatchKind::kway && room_mode == RoomMode::agnostic)
    errors.push_back("problem.room_mode: room-agnostic kway matching is not supported");
  if (kind == MatchKind::pair && photos_per_apartment != 1)
    errors.push_back("problem.photos_per_apartment: pair matching takes a single photo");
  if (kind == MatchKind::set && photos_per_apartment == 1 && fusion.layer == FusionLayer::image &&
      fusion.func == FusionFunc::concatenation) {
    // degenerate but allowed; nothing to flag
  }
  if (photos_per_apartment == 1 && !room_type)
    errors.push_back("problem.room_type: required when photos_per_apartment = 1");
  return errors;
}

double MatchProblem::chance_percent() const {
  if (kind == MatchKind::kway) return 100.0 / k;
  return 50.0;
}

std::string MatchProblem::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == MatchKind::kway) os << k;
  os << "-" << to_string(room_mode);
  os << "-"
     << (room_type && photos_per_apartment == 1 ? synth::to_string(*room_type) : "all");
  if (kind == MatchKind::set)
    os << "-" << to_string(fusion.layer) << "-" << to_string(fusion.func);
  return os.str();
}

}  // namespace floormatch::match
