#pragma once

#include "floormatch/common.hpp"
#include "floormatch/synth/apartment.hpp"

namespace floormatch::synth {

struct GeneratorSpec {
  int floorplan_size = 64;
  int photo_size = 48;
  float object_probability = 0.7f;
  float noise_level = 0.04f;   // photo texture noise sigma, in [0,1] pixel units
  float warp_strength = 0.25f; // photographic shear amount
  int version = 1;

  bool operator==(const GeneratorSpec&) const = default;
};

enum class Modality { floorplan, photo, both };

// Deterministic function of (global_seed, id, spec). Rooms are laid out by
// recursive splitting, each room gets its own palette and fixtures, and both
// modalities are rendered from the same latent.
Apartment generate_apartment(uint64_t global_seed, uint64_t id, const GeneratorSpec& spec);

// Renders an apartment from an explicit latent (used by toggle_object and
// by tests that probe rendering purity).
Apartment render_apartment(const ApartmentLatent& latent, const GeneratorSpec& spec);

Image render_floorplan(const ApartmentLatent& latent, const GeneratorSpec& spec);
Image render_photo(const ApartmentLatent& latent, RoomType room, const GeneratorSpec& spec);
std::vector<Segment> build_segments(const ApartmentLatent& latent, const GeneratorSpec& spec);

// Re-renders only the requested modality with the object's presence flag
// changed; all other latents stay untouched. With Modality::both the stored
// latent is updated as well; single-modality toggles keep the original
// latent and deliberately leave the two modalities inconsistent (that is the
// probe the interpretation module needs).
Apartment toggle_object(const Apartment& apartment, const GeneratorSpec& spec, RoomType room,
                        ObjectKind kind, bool present, Modality modality);

}  // namespace floormatch::synth
