#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "floormatch/synth/dataset.hpp"
#include "floormatch/synth/sampler.hpp"

using namespace floormatch;
using namespace floormatch::synth;

namespace {

GeneratorSpec small_spec() {
  GeneratorSpec s;
  s.floorplan_size = 48;
  s.photo_size = 32;
  return s;
}

bool images_equal(const Image& a, const Image& b) { return a == b; }

// serialize the latent into a comparable key
std::string latent_key(const ApartmentLatent& l) {
  std::string key;
  for (const Room& r : l.rooms) {
    key += std::to_string(r.x0) + "," + std::to_string(r.y0) + ";";
    for (float v : r.palette.wall) key += std::to_string(v) + ",";
    for (const ObjectSpec& o : r.objects)
      key += std::string(o.present ? "1" : "0") + std::to_string(o.x);
  }
  return key;
}

}  // namespace

TEST_CASE("generate_apartment is deterministic") {
  auto spec = small_spec();
  Apartment a = generate_apartment(99, 7, spec);
  Apartment b = generate_apartment(99, 7, spec);
  CHECK(a.latent == b.latent);
  CHECK(images_equal(a.floorplan, b.floorplan));
  for (RoomType t : kRoomTypes) CHECK(images_equal(a.photo(t), b.photo(t)));
  REQUIRE(a.segments.size() == b.segments.size());
  for (size_t i = 0; i < a.segments.size(); ++i) CHECK(a.segments[i].mask == b.segments[i].mask);
}

TEST_CASE("object probability zero removes all icons") {
  auto spec = small_spec();
  spec.object_probability = 0.0f;
  for (uint64_t id = 0; id < 5; ++id) {
    Apartment apt = generate_apartment(5, id, spec);
    for (const Room& room : apt.latent.rooms)
      for (const ObjectSpec& o : room.objects) CHECK_FALSE(o.present);
    // rendering an all-absent latent must equal the generated rasters
    Apartment rerendered = render_apartment(apt.latent, spec);
    CHECK(images_equal(apt.floorplan, rerendered.floorplan));
    // only room-body segments remain
    CHECK(apt.segments.size() == 3);
  }
}

TEST_CASE("basin presence tracks configured probability") {
  auto spec = small_spec();
  spec.object_probability = 0.7f;
  int present = 0;
  const int n = 1000;
  for (int id = 0; id < n; ++id) {
    Apartment apt = generate_apartment(123, static_cast<uint64_t>(id), spec);
    for (const ObjectSpec& o : apt.latent.room(RoomType::bathroom).objects)
      if (o.kind == ObjectKind::basin && o.present) ++present;
  }
  double frac = static_cast<double>(present) / n;
  CHECK(frac == doctest::Approx(0.7).epsilon(0.05 / 0.7));
}

TEST_CASE("room invariants: bounds, legality, disjoint segments") {
  auto spec = small_spec();
  for (uint64_t id = 0; id < 20; ++id) {
    Apartment apt = generate_apartment(321, id, spec);
    std::vector<int> coverage(static_cast<size_t>(spec.floorplan_size) * spec.floorplan_size, 0);
    for (const Room& room : apt.latent.rooms) {
      CHECK(room.x0 >= 0);
      CHECK(room.y0 >= 0);
      CHECK(room.x1 <= spec.floorplan_size);
      CHECK(room.y1 <= spec.floorplan_size);
      for (const ObjectSpec& o : room.objects) CHECK(legal_in(o.kind, room.type));
    }
    for (const Segment& seg : apt.segments)
      for (size_t i = 0; i < seg.mask.size(); ++i)
        if (seg.mask[i]) ++coverage[i];
    for (int c : coverage) CHECK(c <= 1);
    // exactly one photo per room type
    for (RoomType t : kRoomTypes) {
      CHECK(apt.photo(t).width == spec.photo_size);
      CHECK(apt.photo(t).channels == 3);
    }
  }
}

TEST_CASE("toggle_object: no-op, locality, four distinct combinations") {
  auto spec = small_spec();
  spec.object_probability = 1.0f;  // make sure the basin is present
  Apartment apt = generate_apartment(77, 3, spec);

  // toggling to the current state is a bit-identical no-op
  Apartment same = toggle_object(apt, spec, RoomType::bathroom, ObjectKind::basin, true,
                                 Modality::both);
  CHECK(images_equal(apt.floorplan, same.floorplan));
  CHECK(images_equal(apt.photo(RoomType::bathroom), same.photo(RoomType::bathroom)));

  // floorplan-only toggle changes pixels inside the bathroom rect only
  Apartment off = toggle_object(apt, spec, RoomType::bathroom, ObjectKind::basin, false,
                                Modality::floorplan);
  const Room& bath = apt.latent.room(RoomType::bathroom);
  int changed = 0;
  for (int y = 0; y < spec.floorplan_size; ++y)
    for (int x = 0; x < spec.floorplan_size; ++x)
      if (apt.floorplan.at(x, y) != off.floorplan.at(x, y)) {
        ++changed;
        CHECK(x >= bath.x0);
        CHECK(x < bath.x1);
        CHECK(y >= bath.y0);
        CHECK(y < bath.y1);
      }
  CHECK(changed > 0);
  // the photo side was not re-rendered
  CHECK(images_equal(apt.photo(RoomType::bathroom), off.photo(RoomType::bathroom)));

  // the four presence combinations give four distinct raster pairs
  std::set<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>> combos;
  for (bool fp_present : {false, true})
    for (bool ph_present : {false, true}) {
      Apartment v = toggle_object(apt, spec, RoomType::bathroom, ObjectKind::basin, fp_present,
                                  Modality::floorplan);
      v = toggle_object(v, spec, RoomType::bathroom, ObjectKind::basin, ph_present,
                        Modality::photo);
      combos.insert({v.floorplan.pixels, v.photo(RoomType::bathroom).pixels});
    }
  CHECK(combos.size() == 4);

  CHECK_THROWS_AS(toggle_object(apt, spec, RoomType::kitchen, ObjectKind::basin, true,
                                Modality::both),
                  GenerationError);
}

TEST_CASE("pair sampler: balance, id match, room selection") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(9, spec, 60, 0.8);
  Rng rng(1000);
  int positives = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Sample s = make_pair_sample(data, data.train_ids(), rng, RoomType::bathroom);
    REQUIRE(s.photos.size() == 1);
    CHECK(s.photo_rooms[0] == RoomType::bathroom);
    if (s.label == 1) {
      ++positives;
      CHECK(s.photo_ids[0] == s.floorplan_id);
    } else {
      CHECK(s.photo_ids[0] != s.floorplan_id);
    }
    // returned photo is the bathroom rendering
    CHECK(images_equal(s.photos[0], data.by_id(s.photo_ids[0]).photo(RoomType::bathroom)));
  }
  double frac = static_cast<double>(positives) / n;
  CHECK(frac > 0.48);
  CHECK(frac < 0.52);
}

TEST_CASE("kway sampler: distinct candidates, uniform slot") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(10, spec, 40, 0.75);
  Rng rng(2000);
  const int k = 8, n = 8000;
  std::vector<int> slot_counts(k, 0);
  for (int i = 0; i < n; ++i) {
    Sample s = make_kway_sample(data, data.train_ids(), rng, k, RoomType::kitchen);
    REQUIRE(static_cast<int>(s.photo_ids.size()) == k);
    std::set<uint64_t> distinct(s.photo_ids.begin(), s.photo_ids.end());
    CHECK(distinct.size() == static_cast<size_t>(k));
    CHECK(s.photo_ids[static_cast<size_t>(s.true_index)] == s.floorplan_id);
    ++slot_counts[static_cast<size_t>(s.true_index)];
  }
  for (int c : slot_counts) {
    double frac = static_cast<double>(c) / n;
    CHECK(frac == doctest::Approx(1.0 / k).epsilon(0.02 / (1.0 / k)));
  }
  CHECK_THROWS_AS(make_kway_sample(data, data.train_ids(), rng, 1000, std::nullopt),
                  ConfigError);
}

TEST_CASE("split hygiene and latent identifiability") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(11, spec, 50, 0.8);
  std::set<uint64_t> train(data.train_ids().begin(), data.train_ids().end());
  for (uint64_t id : data.test_ids()) CHECK(train.count(id) == 0);

  // distinct apartments never collide in latent space, so a nearest-latent
  // classifier is perfect on pair samples
  std::set<std::string> keys;
  for (uint64_t id : data.train_ids()) keys.insert(latent_key(data.by_id(id).latent));
  CHECK(keys.size() == data.train_ids().size());

  Rng rng(3000);
  int correct = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    Sample s = make_pair_sample(data, data.train_ids(), rng, std::nullopt);
    bool latents_match = latent_key(data.by_id(s.floorplan_id).latent) ==
                         latent_key(data.by_id(s.photo_ids[0]).latent);
    if ((s.label == 1) == latents_match) ++correct;
  }
  CHECK(correct == n);
}

TEST_CASE("floorplan-photo pixel correlation stays low") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(12, spec, 50, 0.8);
  double worst = 0.0;
  for (uint64_t id = 0; id < 50; ++id) {
    const Apartment& apt = data.by_id(id);
    for (RoomType t : kRoomTypes) {
      const Room& room = apt.latent.room(t);
      const Image& photo = apt.photo(t);
      int n = photo.width * photo.height;
      std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
      for (int y = 0; y < photo.height; ++y)
        for (int x = 0; x < photo.width; ++x) {
          // nearest-neighbor resample of the floorplan room crop
          int fx = room.x0 + (x * room.width()) / photo.width;
          int fy = room.y0 + (y * room.height()) / photo.height;
          a[static_cast<size_t>(y * photo.width + x)] = apt.floorplan.at(fx, fy);
          double gray = (photo.at(x, y, 0) + photo.at(x, y, 1) + photo.at(x, y, 2)) / 3.0;
          b[static_cast<size_t>(y * photo.width + x)] = gray;
        }
      double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i) {
        ma += a[static_cast<size_t>(i)];
        mb += b[static_cast<size_t>(i)];
      }
      ma /= n;
      mb /= n;
      double sab = 0, saa = 0, sbb = 0;
      for (int i = 0; i < n; ++i) {
        double da = a[static_cast<size_t>(i)] - ma, db = b[static_cast<size_t>(i)] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
      }
      double r = sab / (std::sqrt(saa * sbb) + 1e-9);
      worst = std::max(worst, std::abs(r));
    }
  }
  CHECK(worst < 0.5);
}

TEST_CASE("dataset save/load round-trips bit-exactly") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(13, spec, 6, 0.5);
  std::string dir = (std::filesystem::temp_directory_path() / "fm_dataset_rt").string();
  std::filesystem::remove_all(dir);
  save_dataset(data, dir);
  Dataset loaded = load_dataset(dir);
  CHECK(loaded.manifest().seed == data.manifest().seed);
  CHECK(loaded.manifest().spec == data.manifest().spec);
  CHECK(loaded.train_ids() == data.train_ids());
  CHECK(loaded.test_ids() == data.test_ids());
  for (uint64_t id = 0; id < 6; ++id) {
    const Apartment& a = data.by_id(id);
    const Apartment& b = loaded.by_id(id);
    CHECK(a.latent == b.latent);
    CHECK(images_equal(a.floorplan, b.floorplan));
    for (RoomType t : kRoomTypes) CHECK(images_equal(a.photo(t), b.photo(t)));
    REQUIRE(a.segments.size() == b.segments.size());
    for (size_t i = 0; i < a.segments.size(); ++i) {
      CHECK(a.segments[i].id == b.segments[i].id);
      CHECK(a.segments[i].mask == b.segments[i].mask);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel generation agrees with serial") {
  auto spec = small_spec();
  Dataset serial = Dataset::generate(14, spec, 16, 0.5, 1);
  Dataset parallel = Dataset::generate(14, spec, 16, 0.5, 4);
  for (uint64_t id = 0; id < 16; ++id) {
    CHECK(images_equal(serial.by_id(id).floorplan, parallel.by_id(id).floorplan));
    CHECK(serial.by_id(id).latent == parallel.by_id(id).latent);
  }
}

TEST_CASE("agnostic sampling shuffles per-sample and is reproducible") {
  auto spec = small_spec();
  Dataset data = Dataset::generate(15, spec, 20, 0.8);
  match::MatchProblem problem;
  problem.kind = match::MatchKind::set;
  problem.photos_per_apartment = 3;
  problem.room_mode = match::RoomMode::agnostic;

  Rng rng1(42), rng2(42);
  bool any_shuffled = false;
  for (int i = 0; i < 50; ++i) {
    Sample a = draw_sample(data, data.train_ids(), rng1, problem);
    Sample b = draw_sample(data, data.train_ids(), rng2, problem);
    CHECK(a.seed == b.seed);
    CHECK(a.photo_rooms == b.photo_rooms);
    if (a.photo_rooms != std::vector<RoomType>{RoomType::bathroom, RoomType::kitchen,
                                               RoomType::living_room})
      any_shuffled = true;
  }
  CHECK(any_shuffled);
}
