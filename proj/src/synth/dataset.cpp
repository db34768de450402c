#include "floormatch/synth/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace floormatch::synth {

namespace fs = std::filesystem;
using nlohmann::json;

Dataset::Dataset(DatasetManifest manifest, std::vector<Apartment> apartments)
    : manifest_(std::move(manifest)), apartments_(std::move(apartments)) {
  for (uint64_t id : manifest_.train_ids)
    for (uint64_t other : manifest_.test_ids)
      if (id == other)
        throw ConfigError("apartment " + std::to_string(id) + " appears in both splits");
}

const Apartment& Dataset::by_id(uint64_t id) const {
  if (id >= apartments_.size() || apartments_[id].id() != id)
    throw ConfigError("unknown apartment id " + std::to_string(id));
  return apartments_[id];
}

Dataset Dataset::generate(uint64_t seed, const GeneratorSpec& spec, int count,
                          double train_fraction, int jobs) {
  if (count < 2) throw GenerationError("dataset needs at least 2 apartments");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw ConfigError("train_fraction must be in (0,1)");
  std::vector<Apartment> apartments(static_cast<size_t>(count));
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i)
      apartments[static_cast<size_t>(i)] = generate_apartment(seed, static_cast<uint64_t>(i), spec);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (int i = w; i < count; i += jobs)
          apartments[static_cast<size_t>(i)] = generate_apartment(seed, static_cast<uint64_t>(i), spec);
      });
    }
    for (auto& t : workers) t.join();
  }
  DatasetManifest m;
  m.seed = seed;
  m.spec = spec;
  int train_count = std::max(1, std::min(count - 1, static_cast<int>(std::lround(count * train_fraction))));
  for (int i = 0; i < train_count; ++i) m.train_ids.push_back(static_cast<uint64_t>(i));
  for (int i = train_count; i < count; ++i) m.test_ids.push_back(static_cast<uint64_t>(i));
  return Dataset(std::move(m), std::move(apartments));
}

namespace {

json spec_to_json(const GeneratorSpec& s) {
  return json{{"floorplan_size", s.floorplan_size}, {"photo_size", s.photo_size},
              {"object_probability", s.object_probability}, {"noise_level", s.noise_level},
              {"warp_strength", s.warp_strength}, {"version", s.version}};
}

GeneratorSpec spec_from_json(const json& j) {
  GeneratorSpec s;
  s.floorplan_size = j.at("floorplan_size").get<int>();
  s.photo_size = j.at("photo_size").get<int>();
  s.object_probability = j.at("object_probability").get<float>();
  s.noise_level = j.at("noise_level").get<float>();
  s.warp_strength = j.at("warp_strength").get<float>();
  s.version = j.at("version").get<int>();
  return s;
}

json latent_to_json(const ApartmentLatent& latent) {
  json rooms = json::array();
  for (const Room& room : latent.rooms) {
    json objs = json::array();
    for (const ObjectSpec& o : room.objects)
      objs.push_back({{"kind", to_string(o.kind)}, {"present", o.present},
                      {"x", o.x}, {"y", o.y}, {"size", o.size}});
    rooms.push_back({{"type", to_string(room.type)},
                     {"rect", {room.x0, room.y0, room.x1, room.y1}},
                     {"palette", {{"wall", room.palette.wall}, {"floor", room.palette.floor},
                                  {"accent", room.palette.accent},
                                  {"icon_shade", room.palette.icon_shade},
                                  {"fill_shade", room.palette.fill_shade}}},
                     {"objects", objs}});
  }
  return json{{"id", latent.id}, {"render_seed", latent.render_seed},
              {"warp_shear", latent.warp_shear}, {"rooms", rooms}};
}

ApartmentLatent latent_from_json(const json& j) {
  ApartmentLatent latent;
  latent.id = j.at("id").get<uint64_t>();
  latent.render_seed = j.at("render_seed").get<uint64_t>();
  latent.warp_shear = j.at("warp_shear").get<float>();
  const auto& rooms = j.at("rooms");
  for (size_t i = 0; i < 3; ++i) {
    const auto& rj = rooms.at(i);
    Room& room = latent.rooms[i];
    room.type = *room_type_from_string(rj.at("type").get<std::string>());
    const auto& rect = rj.at("rect");
    room.x0 = rect.at(0).get<int>();
    room.y0 = rect.at(1).get<int>();
    room.x1 = rect.at(2).get<int>();
    room.y1 = rect.at(3).get<int>();
    const auto& pj = rj.at("palette");
    pj.at("wall").get_to(room.palette.wall);
    pj.at("floor").get_to(room.palette.floor);
    pj.at("accent").get_to(room.palette.accent);
    room.palette.icon_shade = pj.at("icon_shade").get<float>();
    room.palette.fill_shade = pj.at("fill_shade").get<float>();
    for (const auto& oj : rj.at("objects")) {
      ObjectSpec o;
      o.kind = *object_kind_from_string(oj.at("kind").get<std::string>());
      o.present = oj.at("present").get<bool>();
      o.x = oj.at("x").get<float>();
      o.y = oj.at("y").get<float>();
      o.size = oj.at("size").get<float>();
      room.objects.push_back(o);
    }
  }
  return latent;
}

std::string apartment_dirname(uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "apt_%05llu", static_cast<unsigned long long>(id));
  return buf;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& dir) {
  fs::create_directories(dir);
  const DatasetManifest& m = dataset.manifest();
  json manifest{{"seed", m.seed}, {"version", m.version}, {"spec", spec_to_json(m.spec)},
                {"train_ids", m.train_ids}, {"test_ids", m.test_ids}};
  json paths = json::object();
  auto save_one = [&](uint64_t id) {
    const Apartment& apt = dataset.by_id(id);
    std::string sub = apartment_dirname(id);
    fs::create_directories(fs::path(dir) / sub);
    std::string base = (fs::path(dir) / sub).string();
    write_png(base + "/floorplan.png", apt.floorplan);
    for (RoomType t : kRoomTypes)
      write_png(base + "/photo_" + to_string(t) + ".png", apt.photo(t));
    // segment raster: pixel value = segment id
    int s = apt.floorplan.width;
    std::vector<uint8_t> seg(static_cast<size_t>(s) * s, 0);
    json seg_meta = json::array();
    for (const Segment& segment : apt.segments) {
      for (size_t i = 0; i < segment.mask.size(); ++i)
        if (segment.mask[i]) seg[i] = static_cast<uint8_t>(segment.id);
      json sm{{"id", segment.id}, {"room", to_string(segment.room)}};
      sm["fixture"] = segment.fixture ? json(to_string(*segment.fixture)) : json(nullptr);
      seg_meta.push_back(sm);
    }
    write_indexed_png(base + "/segments.png", s, s, seg);
    json latent = latent_to_json(apt.latent);
    latent["segments"] = seg_meta;
    std::ofstream lf(base + "/latent.json");
    lf << latent.dump(2) << "\n";
    paths[std::to_string(id)] = sub;
  };
  for (uint64_t id : m.train_ids) save_one(id);
  for (uint64_t id : m.test_ids) save_one(id);
  manifest["paths"] = paths;
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw ConfigError("no manifest.json in " + dir);
  json manifest = json::parse(mf);
  DatasetManifest m;
  m.seed = manifest.at("seed").get<uint64_t>();
  m.version = manifest.at("version").get<int>();
  m.spec = spec_from_json(manifest.at("spec"));
  manifest.at("train_ids").get_to(m.train_ids);
  manifest.at("test_ids").get_to(m.test_ids);

  std::vector<uint64_t> all = m.train_ids;
  all.insert(all.end(), m.test_ids.begin(), m.test_ids.end());
  std::sort(all.begin(), all.end());
  std::vector<Apartment> apartments(all.empty() ? 0 : all.back() + 1);
  for (uint64_t id : all) {
    std::string sub = manifest.at("paths").at(std::to_string(id)).get<std::string>();
    std::string base = (fs::path(dir) / sub).string();
    Apartment apt;
    std::ifstream lf(base + "/latent.json");
    if (!lf) throw ConfigError("missing latent.json for apartment " + std::to_string(id));
    json latent = json::parse(lf);
    apt.latent = latent_from_json(latent);
    apt.floorplan = read_png(base + "/floorplan.png");
    for (RoomType t : kRoomTypes)
      apt.photos[static_cast<size_t>(t)] = read_png(base + std::string("/photo_") + to_string(t) + ".png");
    int w = 0, h = 0;
    auto seg_raster = read_indexed_png(base + "/segments.png", w, h);
    for (const auto& sm : latent.at("segments")) {
      Segment segment;
      segment.id = sm.at("id").get<int>();
      segment.room = *room_type_from_string(sm.at("room").get<std::string>());
      if (!sm.at("fixture").is_null())
        segment.fixture = object_kind_from_string(sm.at("fixture").get<std::string>());
      segment.mask.assign(static_cast<size_t>(w) * h, 0);
      for (size_t i = 0; i < seg_raster.size(); ++i)
        if (seg_raster[i] == segment.id) segment.mask[i] = 1;
      apt.segments.push_back(std::move(segment));
    }
    apartments[id] = std::move(apt);
  }
  return Dataset(std::move(m), std::move(apartments));
}

}  // namespace floormatch::synth
