#pragma once

#include "floormatch/match/problem.hpp"
#include "floormatch/synth/dataset.hpp"

namespace floormatch::synth {

// One training or evaluation instance. For pair/set problems `photos` holds
// the photo(-set) in the order the matcher should consume it; for kway
// problems it holds k candidate photo(-set)s flattened candidate-major.
struct Sample {
  Image floorplan;
  std::vector<Image> photos;
  std::vector<RoomType> photo_rooms;  // parallel to photos
  int label = 0;                      // +1 / -1 for pair and set
  int true_index = -1;                // kway
  int k = 1;
  int photos_per_candidate = 1;
  uint64_t seed = 0;                  // this sample's own stream id
  uint64_t floorplan_id = 0;
  std::vector<uint64_t> photo_ids;    // apartment id per candidate (kway) or per photo source
};

// Positive with probability 1/2 (photos from the floorplan's apartment),
// otherwise photos come from one uniformly random different apartment.
Sample make_pair_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                        std::optional<RoomType> room_type);

// Exactly one of the k candidates shares the floorplan's apartment;
// true_index is uniform; all candidate apartment ids are distinct.
Sample make_kway_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                        int k, std::optional<RoomType> room_type, int photos_per_candidate = 1);

// Problem-directed sampling: pair/set/kway with the problem's photo count;
// room-agnostic problems shuffle the photo order using the sample's own
// seeded stream.
Sample draw_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                   const match::MatchProblem& problem);

}  // namespace floormatch::synth
