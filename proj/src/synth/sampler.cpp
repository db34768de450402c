#include "floormatch/synth/sampler.hpp"

#include <algorithm>

namespace floormatch::synth {

namespace {

void append_photos(Sample& sample, const Apartment& apt, std::optional<RoomType> room_type) {
  if (room_type) {
    sample.photos.push_back(apt.photo(*room_type));
    sample.photo_rooms.push_back(*room_type);
  } else {
    for (RoomType t : kRoomTypes) {
      sample.photos.push_back(apt.photo(t));
      sample.photo_rooms.push_back(t);
    }
  }
}

uint64_t pick_other(const std::vector<uint64_t>& pool, Rng& rng, uint64_t avoid) {
  uint64_t id;
  do {
    id = pool[rng.uniform_int(pool.size())];
  } while (id == avoid);
  return id;
}

}  // namespace

Sample make_pair_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                        std::optional<RoomType> room_type) {
  if (pool.size() < 2) throw ConfigError("pair sampling needs at least 2 apartments");
  Sample sample;
  sample.seed = rng.next_u64();
  Rng local(sample.seed);
  sample.floorplan_id = pool[local.uniform_int(pool.size())];
  bool positive = local.bernoulli(0.5);
  uint64_t photo_id = positive ? sample.floorplan_id : pick_other(pool, local, sample.floorplan_id);
  sample.label = positive ? 1 : -1;
  sample.floorplan = dataset.by_id(sample.floorplan_id).floorplan;
  append_photos(sample, dataset.by_id(photo_id), room_type);
  sample.photo_ids.push_back(photo_id);
  sample.photos_per_candidate = static_cast<int>(sample.photos.size());
  return sample;
}

Sample make_kway_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                        int k, std::optional<RoomType> room_type, int photos_per_candidate) {
  if (k < 2) throw ConfigError("kway sampling requires k >= 2");
  if (static_cast<size_t>(k) > pool.size())
    throw ConfigError("k=" + std::to_string(k) + " exceeds pool of " + std::to_string(pool.size()));
  Sample sample;
  sample.seed = rng.next_u64();
  Rng local(sample.seed);
  sample.k = k;
  sample.photos_per_candidate = photos_per_candidate;
  sample.floorplan_id = pool[local.uniform_int(pool.size())];
  sample.floorplan = dataset.by_id(sample.floorplan_id).floorplan;
  sample.true_index = static_cast<int>(local.uniform_int(static_cast<uint64_t>(k)));

  // distinct distractor ids, none equal to the floorplan's apartment
  std::vector<uint64_t> ids;
  ids.reserve(static_cast<size_t>(k));
  while (ids.size() + 1 < static_cast<size_t>(k)) {
    uint64_t id = pool[local.uniform_int(pool.size())];
    if (id == sample.floorplan_id) continue;
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) continue;
    ids.push_back(id);
  }
  ids.insert(ids.begin() + sample.true_index, sample.floorplan_id);

  std::optional<RoomType> rt = room_type;
  if (photos_per_candidate == 3) rt = std::nullopt;
  for (uint64_t id : ids) {
    append_photos(sample, dataset.by_id(id), rt);
    sample.photo_ids.push_back(id);
  }
  return sample;
}

Sample draw_sample(const Dataset& dataset, const std::vector<uint64_t>& pool, Rng& rng,
                   const match::MatchProblem& problem) {
  std::optional<RoomType> rt =
      problem.photos_per_apartment == 1 ? problem.room_type : std::nullopt;
  Sample sample;
  if (problem.kind == match::MatchKind::kway) {
    sample = make_kway_sample(dataset, pool, rng, problem.k, rt, problem.photos_per_apartment);
  } else {
    sample = make_pair_sample(dataset, pool, rng, rt);
    if (problem.room_mode == match::RoomMode::agnostic && sample.photos.size() > 1) {
      // shuffle photo order from the sample's own stream
      Rng shuffle_rng = Rng(sample.seed).derive("shuffle");
      std::vector<size_t> order(sample.photos.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      shuffle_rng.shuffle(order);
      std::vector<Image> photos;
      std::vector<RoomType> rooms;
      for (size_t i : order) {
        photos.push_back(std::move(sample.photos[i]));
        rooms.push_back(sample.photo_rooms[i]);
      }
      sample.photos = std::move(photos);
      sample.photo_rooms = std::move(rooms);
    }
  }
  return sample;
}

}  // namespace floormatch::synth
