#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floormatch/synth/image.hpp"

namespace floormatch::synth {

enum class RoomType : int { bathroom = 0, kitchen = 1, living_room = 2 };
constexpr std::array<RoomType, 3> kRoomTypes = {RoomType::bathroom, RoomType::kitchen,
                                                RoomType::living_room};

enum class ObjectKind : int { basin = 0, bathtub, counter, stove, sofa, table };

const char* to_string(RoomType t);
const char* to_string(ObjectKind k);
std::optional<RoomType> room_type_from_string(const std::string& s);
std::optional<ObjectKind> object_kind_from_string(const std::string& s);

// which fixtures may appear in which room
bool legal_in(ObjectKind kind, RoomType room);
std::array<ObjectKind, 2> legal_kinds(RoomType room);

struct ObjectSpec {
  ObjectKind kind;
  bool present = false;
  float x = 0.5f;     // center within the room rect, normalized [0,1]
  float y = 0.5f;
  float size = 0.2f;  // fraction of the room's smaller extent

  bool operator==(const ObjectSpec&) const = default;
};

// Shared color/texture latent: photo rendering uses the RGB fields, the
// floorplan uses the derived gray shades, so the two modalities carry the
// same latent in different forms.
struct Palette {
  std::array<float, 3> wall{};
  std::array<float, 3> floor{};
  std::array<float, 3> accent{};
  float icon_shade = 0.3f;
  float fill_shade = 0.9f;

  bool operator==(const Palette&) const = default;
};

struct Room {
  RoomType type = RoomType::bathroom;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // floorplan rect, half-open
  std::vector<ObjectSpec> objects;
  Palette palette;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool operator==(const Room&) const = default;
};

struct ApartmentLatent {
  uint64_t id = 0;
  uint64_t render_seed = 0;  // drives photo texture noise
  std::array<Room, 3> rooms;  // indexed by RoomType
  float warp_shear = 0.0f;

  const Room& room(RoomType t) const { return rooms[static_cast<size_t>(t)]; }
  Room& room(RoomType t) { return rooms[static_cast<size_t>(t)]; }
  bool operator==(const ApartmentLatent&) const = default;
};

// One disjoint floorplan segment: a room body or a single fixture icon.
struct Segment {
  int id = 0;  // 1-based; pixel value in the mask raster, 0 = background
  RoomType room = RoomType::bathroom;
  std::optional<ObjectKind> fixture;
  std::vector<uint8_t> mask;  // 0/1 over floorplan pixels
};

struct Apartment {
  ApartmentLatent latent;
  Image floorplan;             // grayscale
  std::array<Image, 3> photos;  // RGB, indexed by RoomType
  std::vector<Segment> segments;

  uint64_t id() const { return latent.id; }
  const Image& photo(RoomType t) const { return photos[static_cast<size_t>(t)]; }
};

}  // namespace floormatch::synth
