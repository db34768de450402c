#include "floormatch/interpret/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace floormatch::interp {

namespace {

uint8_t noise_to_byte(double v) {
  double x = (v + 1.0) * 0.5 * 255.0;  // normalized domain back to bytes
  return static_cast<uint8_t>(std::lround(std::clamp(x, 0.0, 255.0)));
}

}  // namespace

std::pair<int, int> Heatmap::argmax_cell() const {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {static_cast<int>(best) / grid_w, static_cast<int>(best) % grid_w};
}

Heatmap rf_map(Matcher& model, const Image& floorplan, const synth::Sample& photo_side,
               const RfConfig& cfg) {
  if (cfg.window < 1 || cfg.window % 2 == 0)
    throw ConfigError("rf window must be a positive odd integer");
  if (cfg.window > floorplan.width || cfg.window > floorplan.height)
    throw ConfigError("rf window larger than the floorplan");
  if (cfg.stride < 1) throw ConfigError("rf stride must be >= 1");
  if (cfg.samples_per_window < 1) throw ConfigError("rf samples_per_window must be >= 1");

  auto probe = model.make_probe(photo_side);
  Heatmap map;
  map.window = cfg.window;
  map.stride = cfg.stride;
  map.grid_h = (floorplan.height - cfg.window) / cfg.stride + 1;
  map.grid_w = (floorplan.width - cfg.window) / cfg.stride + 1;
  map.baseline = probe->score({floorplan})[0];
  map.values.assign(static_cast<size_t>(map.grid_h) * map.grid_w, 0.0f);

  std::vector<Image> batch;
  std::vector<size_t> batch_cells;
  batch.reserve(static_cast<size_t>(std::max(1, cfg.batch)));

  auto flush = [&] {
    if (batch.empty()) return;
    std::vector<float> scores = probe->score(batch);
    for (size_t i = 0; i < scores.size(); ++i) map.values[batch_cells[i]] += scores[i];
    batch.clear();
    batch_cells.clear();
  };

  for (int gy = 0; gy < map.grid_h; ++gy) {
    for (int gx = 0; gx < map.grid_w; ++gx) {
      size_t cell = static_cast<size_t>(gy) * map.grid_w + gx;
      uint64_t pos_tag = static_cast<uint64_t>(gy) * static_cast<uint64_t>(map.grid_w) + gx;
      for (int s = 0; s < cfg.samples_per_window; ++s) {
        Rng noise = Rng(cfg.seed).derive("rf-window", pos_tag).derive("sample",
                                                                      static_cast<uint64_t>(s));
        Image corrupted = floorplan;
        int y0 = gy * cfg.stride, x0 = gx * cfg.stride;
        for (int y = y0; y < y0 + cfg.window; ++y)
          for (int x = x0; x < x0 + cfg.window; ++x)
            for (int c = 0; c < corrupted.channels; ++c)
              corrupted.at(x, y, c) = noise_to_byte(noise.normal(0.0, cfg.noise_sigma));
        batch.push_back(std::move(corrupted));
        batch_cells.push_back(cell);
        if (static_cast<int>(batch.size()) >= std::max(1, cfg.batch)) flush();
      }
    }
  }
  flush();

  float inv = 1.0f / static_cast<float>(cfg.samples_per_window);
  for (float& v : map.values) v = map.baseline - v * inv;
  return map;
}

void write_heatmap_csv(const std::string& path, uint64_t seed, const Heatmap& map) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << "# seed=" << seed << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(map.baseline));
  os << "# baseline=" << buf << " window=" << map.window << " stride=" << map.stride << "\n";
  for (int r = 0; r < map.grid_h; ++r) {
    for (int c = 0; c < map.grid_w; ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(map.at(r, c)));
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
}

void write_heatmap_png(const std::string& path, const Heatmap& map) {
  float peak = 1e-12f;
  for (float v : map.values) peak = std::max(peak, std::abs(v));
  Image img(map.grid_w, map.grid_h, 3);
  for (int r = 0; r < map.grid_h; ++r)
    for (int c = 0; c < map.grid_w; ++c) {
      float t = std::clamp(map.at(r, c) / peak, -1.0f, 1.0f);
      // diverging map: blue (negative) - white (zero) - red (positive)
      float red = t >= 0 ? 1.0f : 1.0f + t;
      float green = 1.0f - std::abs(t);
      float blue = t <= 0 ? 1.0f : 1.0f - t;
      img.at(c, r, 0) = static_cast<uint8_t>(std::lround(red * 255.0f));
      img.at(c, r, 1) = static_cast<uint8_t>(std::lround(green * 255.0f));
      img.at(c, r, 2) = static_cast<uint8_t>(std::lround(blue * 255.0f));
    }
  synth::write_png(path, img);
}

SensitivityMatrix object_sensitivity(Matcher& model, const Apartment& apartment,
                                     const GeneratorSpec& spec, RoomType room, ObjectKind kind) {
  if (model.problem().photos_per_apartment != 1)
    throw ConfigError("object_sensitivity expects a single-photo pair model");
  SensitivityMatrix m;
  for (int fp_state = 0; fp_state < 2; ++fp_state) {
    Apartment with_fp = synth::toggle_object(apartment, spec, room, kind, fp_state == 1,
                                             synth::Modality::floorplan);
    for (int ph_state = 0; ph_state < 2; ++ph_state) {
      Apartment probe_apt = synth::toggle_object(with_fp, spec, room, kind, ph_state == 1,
                                                 synth::Modality::photo);
      synth::Sample s;
      s.floorplan = probe_apt.floorplan;
      s.photos = {probe_apt.photo(room)};
      s.photo_rooms = {room};
      m.cell[fp_state][ph_state] = model.score(s);
    }
  }
  return m;
}

SimplifyResult simplify_localize(Matcher& model, const Apartment& apartment, RoomType photo_room,
                                 const SimplifyConfig& cfg) {
  if (apartment.segments.empty()) throw ConfigError("apartment has no segments");
  synth::Sample photo_side;
  photo_side.floorplan = apartment.floorplan;
  photo_side.photos = {apartment.photo(photo_room)};
  photo_side.photo_rooms = {photo_room};
  auto probe = model.make_probe(photo_side);

  Image raster = apartment.floorplan;
  std::vector<const synth::Segment*> remaining;
  for (const auto& seg : apartment.segments) remaining.push_back(&seg);
  // deterministic candidate order: ascending segment id
  std::sort(remaining.begin(), remaining.end(),
            [](const synth::Segment* a, const synth::Segment* b) { return a->id < b->id; });

  SimplifyResult result;
  float current = probe->score({raster})[0];
  result.score_trace.push_back(current);

  auto blank = [](Image img, const synth::Segment& seg) {
    for (size_t i = 0; i < seg.mask.size(); ++i)
      if (seg.mask[i]) img.pixels[i] = 255;  // background
    return img;
  };

  while (remaining.size() > 1) {
    std::vector<Image> candidates;
    candidates.reserve(remaining.size());
    for (const synth::Segment* seg : remaining) candidates.push_back(blank(raster, *seg));
    std::vector<float> scores = probe->score(candidates);
    size_t best = 0;
    for (size_t i = 1; i < scores.size(); ++i)
      if (std::abs(scores[i] - current) < std::abs(scores[best] - current)) best = i;
    // non-positive retention disables the early stop
    if (cfg.retention > 0.0f && scores[best] < cfg.retention * current) break;
    raster = blank(raster, *remaining[best]);
    current = scores[best];
    result.removal_order.push_back(remaining[best]->id);
    result.score_trace.push_back(current);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  for (const synth::Segment* seg : remaining) result.survivors.push_back(seg->id);
  return result;
}

std::map<RoomType, std::pair<int, int>> place_photos(Matcher& model, const Image& floorplan,
                                                     const std::map<RoomType, Image>& photos,
                                                     const RfConfig& cfg) {
  std::map<RoomType, std::pair<int, int>> placements;
  for (const auto& [room, photo] : photos) {
    synth::Sample side;
    side.floorplan = floorplan;
    side.photos = {photo};
    side.photo_rooms = {room};
    Heatmap map = rf_map(model, floorplan, side, cfg);
    auto [row, col] = map.argmax_cell();
    placements[room] = map.cell_to_pixel(row, col);
  }
  return placements;
}

RetrievalIndex::RetrievalIndex(Matcher& model, const std::vector<Image>& corpus,
                               RoomType room_type)
    : room_(room_type) {
  matcher_ = dynamic_cast<match::PairMatcherT<float>*>(&model);
  if (!matcher_) throw ConfigError("retrieval requires a pair matcher");
  if (corpus.empty()) throw ConfigError("retrieval corpus is empty");
  corpus_features = matcher_->photo_bank().room(room_type).encode(
      enc::to_tensor_batch<float>(corpus));
}

std::vector<RankedPhoto> RetrievalIndex::query(const Image& floorplan, int top_n) const {
  int n = corpus_features.dim(0);
  int d = corpus_features.dim(1);
  auto fp_feat = matcher_->floorplan_encoder().encode(enc::to_tensor<float>(floorplan));
  // tile the floorplan feature against every corpus row
  std::vector<float> tiled(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    std::copy(fp_feat.data().begin(), fp_feat.data().end(),
              tiled.begin() + static_cast<size_t>(i) * d);
  auto fp_rows = nn::Tensor<float>::from_data({n, d}, std::move(tiled));
  auto scores = matcher_->head().score(fp_rows, corpus_features);  // [n,1]

  std::vector<RankedPhoto> ranked(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    ranked[static_cast<size_t>(i)] = {i, scores.data()[static_cast<size_t>(i)]};
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPhoto& a, const RankedPhoto& b) { return a.score > b.score; });
  if (top_n < static_cast<int>(ranked.size()) && top_n >= 0)
    ranked.resize(static_cast<size_t>(top_n));
  return ranked;
}

std::vector<RankedPhoto> retrieve(Matcher& model, const Image& floorplan,
                                  const std::vector<Image>& corpus, RoomType room_type,
                                  int top_n) {
  RetrievalIndex index(model, corpus, room_type);
  return index.query(floorplan, top_n);
}

}  // namespace floormatch::interp
