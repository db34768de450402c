#include "floormatch/synth/generator.hpp"

#include <algorithm>
#include <cmath>

namespace floormatch::synth {

const char* to_string(RoomType t) {
  switch (t) {
    case RoomType::bathroom: return "bathroom";
    case RoomType::kitchen: return "kitchen";
    case RoomType::living_room: return "living_room";
  }
  return "?";
}

const char* to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::basin: return "basin";
    case ObjectKind::bathtub: return "bathtub";
    case ObjectKind::counter: return "counter";
    case ObjectKind::stove: return "stove";
    case ObjectKind::sofa: return "sofa";
    case ObjectKind::table: return "table";
  }
  return "?";
}

std::optional<RoomType> room_type_from_string(const std::string& s) {
  for (RoomType t : kRoomTypes)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

std::optional<ObjectKind> object_kind_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ObjectKind::table); ++i) {
    auto k = static_cast<ObjectKind>(i);
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::array<ObjectKind, 2> legal_kinds(RoomType room) {
  switch (room) {
    case RoomType::bathroom: return {ObjectKind::basin, ObjectKind::bathtub};
    case RoomType::kitchen: return {ObjectKind::counter, ObjectKind::stove};
    case RoomType::living_room: return {ObjectKind::sofa, ObjectKind::table};
  }
  return {ObjectKind::basin, ObjectKind::bathtub};
}

bool legal_in(ObjectKind kind, RoomType room) {
  auto ks = legal_kinds(room);
  return kind == ks[0] || kind == ks[1];
}

namespace {

float luminance(const std::array<float, 3>& rgb) {
  return 0.299f * rgb[0] + 0.587f * rgb[1] + 0.114f * rgb[2];
}

uint8_t to_u8(float v) {
  float x = std::clamp(v, 0.0f, 1.0f) * 255.0f;
  return static_cast<uint8_t>(std::lround(x));
}

// ---- drawing helpers (grayscale unless noted) ----

void fill_rect(Image& img, int x0, int y0, int x1, int y1, uint8_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width);
  y1 = std::min(y1, img.height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) img.at(x, y) = v;
}

void rect_outline(Image& img, int x0, int y0, int x1, int y1, uint8_t v) {
  fill_rect(img, x0, y0, x1, y0 + 1, v);
  fill_rect(img, x0, y1 - 1, x1, y1, v);
  fill_rect(img, x0, y0, x0 + 1, y1, v);
  fill_rect(img, x1 - 1, y0, x1, y1, v);
}

void fill_disc(Image& img, int cx, int cy, int r, uint8_t v) {
  for (int y = cy - r; y <= cy + r; ++y)
    for (int x = cx - r; x <= cx + r; ++x) {
      if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
      int dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r * r) img.at(x, y) = v;
    }
}

void ring(Image& img, int cx, int cy, int r, uint8_t v) {
  for (int y = cy - r; y <= cy + r; ++y)
    for (int x = cx - r; x <= cx + r; ++x) {
      if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
      int dx = x - cx, dy = y - cy;
      int d2 = dx * dx + dy * dy;
      if (d2 <= r * r && d2 >= (r - 1) * (r - 1)) img.at(x, y) = v;
    }
}

// RGB painter with a simple shade multiplier
void fill_rect_rgb(Image& img, int x0, int y0, int x1, int y1,
                   const std::array<float, 3>& rgb, float shade = 1.0f) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width);
  y1 = std::min(y1, img.height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_u8(rgb[static_cast<size_t>(c)] * shade);
}

void fill_ellipse_rgb(Image& img, int cx, int cy, int rx, int ry,
                      const std::array<float, 3>& rgb, float shade = 1.0f) {
  for (int y = cy - ry; y <= cy + ry; ++y)
    for (int x = cx - rx; x <= cx + rx; ++x) {
      if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
      float nx = rx > 0 ? static_cast<float>(x - cx) / rx : 0.0f;
      float ny = ry > 0 ? static_cast<float>(y - cy) / ry : 0.0f;
      if (nx * nx + ny * ny <= 1.0f)
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_u8(rgb[static_cast<size_t>(c)] * shade);
    }
}

struct IconBox {
  int x0, y0, x1, y1;  // half-open box on the floorplan
};

// Icon geometry is a pure function of the room rect and the object latent,
// clamped so icons never touch the walls. Segments and the renderer share it.
IconBox icon_box(const Room& room, const ObjectSpec& obj) {
  int iw = room.width(), ih = room.height();
  int half = std::max(2, static_cast<int>(std::lround(obj.size * std::min(iw, ih) * 0.5f)));
  int cx = room.x0 + static_cast<int>(std::lround(obj.x * (iw - 1)));
  int cy = room.y0 + static_cast<int>(std::lround(obj.y * (ih - 1)));
  cx = std::clamp(cx, room.x0 + 2 + half, room.x1 - 3 - half);
  cy = std::clamp(cy, room.y0 + 2 + half, room.y1 - 3 - half);
  return {cx - half, cy - half, cx + half + 1, cy + half + 1};
}

void draw_icon(Image& fp, const Room& room, const ObjectSpec& obj) {
  IconBox box = icon_box(room, obj);
  uint8_t shade = to_u8(room.palette.icon_shade);
  int cx = (box.x0 + box.x1) / 2, cy = (box.y0 + box.y1) / 2;
  int half = (box.x1 - box.x0) / 2;
  uint8_t dark = to_u8(room.palette.icon_shade * 0.5f);
  switch (obj.kind) {
    case ObjectKind::basin:
      fill_disc(fp, cx, cy, half, shade);
      ring(fp, cx, cy, half, dark);
      break;
    case ObjectKind::bathtub:
      fill_rect(fp, box.x0, box.y0, box.x1, box.y1, shade);
      rect_outline(fp, box.x0, box.y0, box.x1, box.y1, dark);
      fill_rect(fp, box.x0 + 1, cy, box.x1 - 1, cy + 1, dark);
      break;
    case ObjectKind::counter:
      fill_rect(fp, box.x0, box.y0, box.x1, box.y1, shade);
      for (int y = box.y0 + 1; y < box.y1; y += 2)
        fill_rect(fp, box.x0, y, box.x1, y + 1, dark);
      break;
    case ObjectKind::stove:
      fill_rect(fp, box.x0, box.y0, box.x1, box.y1, shade);
      fill_disc(fp, cx - half / 2, cy - half / 2, 1, dark);
      fill_disc(fp, cx + half / 2, cy - half / 2, 1, dark);
      fill_disc(fp, cx - half / 2, cy + half / 2, 1, dark);
      fill_disc(fp, cx + half / 2, cy + half / 2, 1, dark);
      break;
    case ObjectKind::sofa:
      fill_rect(fp, box.x0, box.y0, box.x1, box.y1, shade);
      fill_rect(fp, box.x0, box.y0, box.x1, box.y0 + 2, dark);
      break;
    case ObjectKind::table:
      fill_disc(fp, cx, cy, half, shade);
      ring(fp, cx, cy, half / 2, dark);
      break;
  }
}

constexpr uint8_t kWallShade = 25;
constexpr uint8_t kBackground = 255;

}  // namespace

Image render_floorplan(const ApartmentLatent& latent, const GeneratorSpec& spec) {
  int s = spec.floorplan_size;
  Image fp(s, s, 1, kBackground);
  for (const Room& room : latent.rooms) {
    uint8_t fill = to_u8(room.palette.fill_shade);
    fill_rect(fp, room.x0 + 1, room.y0 + 1, room.x1 - 1, room.y1 - 1, fill);
    // drafting convention: tile dots in wet rooms, hatching in kitchens
    uint8_t pattern = to_u8(room.palette.fill_shade * 0.72f);
    if (room.type == RoomType::bathroom) {
      for (int y = room.y0 + 2; y < room.y1 - 1; y += 4)
        for (int x = room.x0 + 2; x < room.x1 - 1; x += 4) fp.at(x, y) = pattern;
    } else if (room.type == RoomType::kitchen) {
      for (int y = room.y0 + 3; y < room.y1 - 1; y += 5)
        fill_rect(fp, room.x0 + 1, y, room.x1 - 1, y + 1, pattern);
    }
    rect_outline(fp, room.x0, room.y0, room.x1, room.y1, kWallShade);
  }
  rect_outline(fp, 0, 0, s, s, kWallShade);
  for (const Room& room : latent.rooms)
    for (const ObjectSpec& obj : room.objects)
      if (obj.present) draw_icon(fp, room, obj);
  return fp;
}

Image render_photo(const ApartmentLatent& latent, RoomType room_type, const GeneratorSpec& spec) {
  const Room& room = latent.room(room_type);
  int s = spec.photo_size;
  Image ph(s, s, 3);

  // room aspect shifts the horizon, tying photo geometry to the layout
  float aspect = room.height() > 0 ? static_cast<float>(room.width()) / room.height() : 1.0f;
  int horizon = static_cast<int>(std::lround(s * (0.52f + 0.14f * std::clamp(aspect - 1.0f, -1.0f, 1.0f))));
  horizon = std::clamp(horizon, s / 4, 3 * s / 4);

  const Palette& pal = room.palette;
  for (int y = 0; y < horizon; ++y) {
    float g = 0.82f + 0.3f * (static_cast<float>(y) / horizon);
    for (int x = 0; x < s; ++x)
      for (int c = 0; c < 3; ++c) ph.at(x, y, c) = to_u8(pal.wall[static_cast<size_t>(c)] * g);
  }
  for (int y = horizon; y < s; ++y) {
    float g = 1.05f - 0.35f * (static_cast<float>(y - horizon) / std::max(1, s - horizon));
    for (int x = 0; x < s; ++x)
      for (int c = 0; c < 3; ++c) ph.at(x, y, c) = to_u8(pal.floor[static_cast<size_t>(c)] * g);
  }
  // horizon shadow line
  fill_rect_rgb(ph, 0, horizon - 1, s, horizon, pal.wall, 0.45f);

  // room-type texture
  if (room_type == RoomType::bathroom) {
    for (int x = 4; x < s; x += 6) fill_rect_rgb(ph, x, 0, x + 1, horizon - 1, pal.wall, 0.8f);
  } else if (room_type == RoomType::kitchen) {
    for (int y = 4; y < horizon - 1; y += 6) fill_rect_rgb(ph, 0, y, s, y + 1, pal.wall, 0.82f);
  } else {
    fill_rect_rgb(ph, 0, horizon - 3, s, horizon - 1, pal.wall, 0.65f);
  }

  float shear = latent.warp_shear * spec.warp_strength;
  for (const ObjectSpec& obj : room.objects) {
    if (!obj.present) continue;
    float depth = obj.y;  // 0 = far, 1 = near
    float scale = 0.75f + 0.55f * depth;
    int base_y = horizon + static_cast<int>(std::lround((s - 1 - horizon) * (0.25f + 0.65f * depth)));
    int cx = static_cast<int>(std::lround((0.12f + 0.76f * obj.x) * s +
                                          shear * (base_y - s * 0.5f)));
    int half_w = static_cast<int>(std::lround(obj.size * s * scale));
    int half_h = std::max(2, half_w / 2);
    const auto& acc = pal.accent;
    switch (obj.kind) {
      case ObjectKind::basin:
        fill_ellipse_rgb(ph, cx, base_y - half_h, half_w, half_h, acc, 1.15f);
        fill_ellipse_rgb(ph, cx, base_y - half_h, half_w / 2, half_h / 2, acc, 0.7f);
        break;
      case ObjectKind::bathtub:
        fill_rect_rgb(ph, cx - half_w - 2, base_y - half_h, cx + half_w + 2, base_y + half_h / 2, acc, 1.0f);
        fill_ellipse_rgb(ph, cx, base_y - half_h / 2, half_w, half_h / 2, acc, 1.3f);
        break;
      case ObjectKind::counter:
        fill_rect_rgb(ph, cx - half_w - 3, base_y - 2 * half_h, cx + half_w + 3, base_y, acc, 0.95f);
        fill_rect_rgb(ph, cx - half_w - 3, base_y - 2 * half_h, cx + half_w + 3, base_y - 2 * half_h + 2, acc, 1.3f);
        break;
      case ObjectKind::stove:
        fill_rect_rgb(ph, cx - half_w / 2, base_y - 2 * half_h, cx + half_w / 2, base_y, acc, 0.8f);
        fill_rect_rgb(ph, cx - half_w / 2, base_y - 2 * half_h, cx + half_w / 2, base_y - 2 * half_h + 2, acc, 0.4f);
        break;
      case ObjectKind::sofa:
        fill_rect_rgb(ph, cx - half_w, base_y - half_h, cx + half_w, base_y + half_h / 2, acc, 1.0f);
        fill_rect_rgb(ph, cx - half_w, base_y - 2 * half_h, cx + half_w, base_y - half_h, acc, 0.75f);
        break;
      case ObjectKind::table:
        fill_rect_rgb(ph, cx - half_w, base_y - half_h, cx + half_w, base_y - half_h + 2, acc, 1.1f);
        fill_rect_rgb(ph, cx - 1, base_y - half_h + 2, cx + 1, base_y + half_h / 2, acc, 0.6f);
        break;
    }
  }

  // deterministic texture noise from the latent's render seed
  Rng noise = Rng(latent.render_seed).derive("photo", static_cast<uint64_t>(room_type));
  float sigma = spec.noise_level;
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x)
      for (int c = 0; c < 3; ++c) {
        float v = ph.at(x, y, c) / 255.0f + static_cast<float>(noise.normal(0.0, sigma));
        ph.at(x, y, c) = to_u8(v);
      }
  return ph;
}

std::vector<Segment> build_segments(const ApartmentLatent& latent, const GeneratorSpec& spec) {
  int s = spec.floorplan_size;
  std::vector<Segment> segments;
  // fixtures claim pixels first-come-first-served, so masks stay disjoint
  // even when two icon boxes overlap geometrically
  std::vector<uint8_t> claimed(static_cast<size_t>(s) * s, 0);
  int next_id = 1;
  for (const Room& room : latent.rooms) {
    Segment body;
    body.id = next_id++;
    body.room = room.type;
    body.mask.assign(static_cast<size_t>(s) * s, 0);
    std::vector<Segment> fixtures;
    for (const ObjectSpec& obj : room.objects) {
      if (!obj.present) continue;
      Segment fix;
      fix.id = next_id++;
      fix.room = room.type;
      fix.fixture = obj.kind;
      fix.mask.assign(static_cast<size_t>(s) * s, 0);
      IconBox box = icon_box(room, obj);
      for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x) {
          size_t i = static_cast<size_t>(y) * s + x;
          if (claimed[i]) continue;
          claimed[i] = 1;
          fix.mask[i] = 1;
        }
      fixtures.push_back(std::move(fix));
    }
    for (int y = room.y0 + 1; y < room.y1 - 1; ++y)
      for (int x = room.x0 + 1; x < room.x1 - 1; ++x) {
        size_t i = static_cast<size_t>(y) * s + x;
        if (claimed[i]) continue;
        claimed[i] = 1;
        body.mask[i] = 1;
      }
    segments.push_back(std::move(body));
    for (auto& f : fixtures) segments.push_back(std::move(f));
  }
  return segments;
}

Apartment render_apartment(const ApartmentLatent& latent, const GeneratorSpec& spec) {
  Apartment apt;
  apt.latent = latent;
  apt.floorplan = render_floorplan(latent, spec);
  for (RoomType t : kRoomTypes)
    apt.photos[static_cast<size_t>(t)] = render_photo(latent, t, spec);
  apt.segments = build_segments(latent, spec);
  return apt;
}

namespace {

struct RectI {
  int x0, y0, x1, y1;
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
};

// Split the floorplan interior into three rects by two straight cuts.
std::array<RectI, 3> split_layout(Rng& rng, int size, int min_extent) {
  RectI interior{1, 1, size - 1, size - 1};
  for (int attempt = 0; attempt < 32; ++attempt) {
    bool vertical1 = rng.bernoulli(0.5);
    float u1 = static_cast<float>(rng.uniform(0.36, 0.64));
    RectI a = interior, b = interior;
    if (vertical1) {
      int cut = interior.x0 + static_cast<int>(std::lround(u1 * interior.w()));
      a.x1 = cut;
      b.x0 = cut;
    } else {
      int cut = interior.y0 + static_cast<int>(std::lround(u1 * interior.h()));
      a.y1 = cut;
      b.y0 = cut;
    }
    // split the larger half again
    RectI& big = (static_cast<int64_t>(a.w()) * a.h() >= static_cast<int64_t>(b.w()) * b.h()) ? a : b;
    bool vertical2 = rng.bernoulli(0.5);
    float u2 = static_cast<float>(rng.uniform(0.38, 0.62));
    RectI c = big, d = big;
    if (vertical2) {
      int cut = big.x0 + static_cast<int>(std::lround(u2 * big.w()));
      c.x1 = cut;
      d.x0 = cut;
    } else {
      int cut = big.y0 + static_cast<int>(std::lround(u2 * big.h()));
      c.y1 = cut;
      d.y0 = cut;
    }
    RectI& small = (&big == &a) ? b : a;
    std::array<RectI, 3> rooms = {small, c, d};
    bool ok = true;
    for (const RectI& r : rooms)
      if (r.w() < min_extent || r.h() < min_extent) ok = false;
    if (ok) return rooms;
  }
  throw GenerationError("could not place 3 rooms of minimum extent " +
                        std::to_string(min_extent) + " on a floorplan of size " +
                        std::to_string(size));
}

Palette draw_palette(Rng& rng) {
  Palette p;
  for (auto& v : p.wall) v = static_cast<float>(rng.uniform(0.35, 0.95));
  for (auto& v : p.floor) v = static_cast<float>(rng.uniform(0.2, 0.8));
  for (auto& v : p.accent) v = static_cast<float>(rng.uniform(0.15, 0.95));
  // wide shade ranges keep the cross-modal palette signal well above the
  // 8-bit quantization floor
  p.fill_shade = 0.50f + 0.45f * luminance(p.wall);
  p.icon_shade = 0.05f + 0.55f * luminance(p.accent);
  return p;
}

}  // namespace

Apartment generate_apartment(uint64_t global_seed, uint64_t id, const GeneratorSpec& spec) {
  if (spec.floorplan_size < 24 || spec.photo_size < 12)
    throw GenerationError("generator raster sizes too small");
  Rng rng = Rng(global_seed).derive("apartment", id);

  ApartmentLatent latent;
  latent.id = id;
  latent.render_seed = rng.next_u64();
  latent.warp_shear = static_cast<float>(rng.uniform(-1.0, 1.0));

  int min_extent = std::max(10, spec.floorplan_size / 5);
  auto rects = split_layout(rng, spec.floorplan_size, min_extent);

  std::vector<int> order = {0, 1, 2};
  rng.shuffle(order);
  for (size_t i = 0; i < 3; ++i) {
    Room& room = latent.rooms[i];
    room.type = static_cast<RoomType>(i);
    const auto& r = rects[static_cast<size_t>(order[i])];
    room.x0 = r.x0;
    room.y0 = r.y0;
    room.x1 = r.x1;
    room.y1 = r.y1;
    room.palette = draw_palette(rng);
    auto kinds = legal_kinds(room.type);
    for (size_t j = 0; j < kinds.size(); ++j) {
      ObjectSpec obj;
      obj.kind = kinds[j];
      obj.present = rng.bernoulli(spec.object_probability);
      // partition horizontally so the two fixtures never overlap
      obj.x = static_cast<float>(j == 0 ? rng.uniform(0.12, 0.42) : rng.uniform(0.58, 0.88));
      obj.y = static_cast<float>(rng.uniform(0.2, 0.8));
      obj.size = static_cast<float>(rng.uniform(0.16, 0.27));
      room.objects.push_back(obj);
    }
  }
  return render_apartment(latent, spec);
}

Apartment toggle_object(const Apartment& apartment, const GeneratorSpec& spec, RoomType room,
                        ObjectKind kind, bool present, Modality modality) {
  if (!legal_in(kind, room))
    throw GenerationError(std::string("object '") + to_string(kind) + "' is not legal in a " +
                          to_string(room));
  ApartmentLatent modified = apartment.latent;
  bool found = false;
  for (ObjectSpec& obj : modified.room(room).objects) {
    if (obj.kind == kind) {
      obj.present = present;
      found = true;
    }
  }
  if (!found) throw GenerationError("object latent missing for requested kind");

  Apartment out = apartment;
  if (modality == Modality::floorplan || modality == Modality::both) {
    out.floorplan = render_floorplan(modified, spec);
    out.segments = build_segments(modified, spec);
  }
  if (modality == Modality::photo || modality == Modality::both) {
    out.photos[static_cast<size_t>(room)] = render_photo(modified, room, spec);
  }
  if (modality == Modality::both) out.latent = modified;
  return out;
}

}  // namespace floormatch::synth
