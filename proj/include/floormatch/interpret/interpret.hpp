#pragma once

#include <map>
#include <utility>

#include "floormatch/harness/train.hpp"
#include "floormatch/synth/generator.hpp"

namespace floormatch::interp {

using harness::Matcher;
using synth::Apartment;
using synth::GeneratorSpec;
using synth::Image;
using synth::ObjectKind;
using synth::RoomType;

struct RfConfig {
  int window = 11;             // odd
  int stride = 1;
  float noise_sigma = 1.0f;    // N(0, sigma) in the normalized input domain
  int samples_per_window = 5;  // noise draws averaged per window
  uint64_t seed = 0;
  int batch = 64;              // probe evaluation batch size
};

// Score-drop heatmap over sliding window positions. value = baseline score
// minus the mean corrupted score; positive cells mark regions whose
// corruption hurts the match. Noise for each (position, sample) derives
// from hash(seed, position, sample), so evaluation order and batching do
// not affect the result.
struct Heatmap {
  int grid_h = 0;
  int grid_w = 0;
  int window = 0;
  int stride = 0;
  float baseline = 0.0f;
  std::vector<float> values;  // row-major grid

  float at(int row, int col) const {
    return values[static_cast<size_t>(row) * grid_w + col];
  }
  // ties resolve to the lowest row-major index
  std::pair<int, int> argmax_cell() const;
  // window-center pixel of a grid cell
  std::pair<int, int> cell_to_pixel(int row, int col) const {
    return {col * stride + window / 2, row * stride + window / 2};
  }
};

// photo_side carries the photo(-set) the probe holds fixed
Heatmap rf_map(Matcher& model, const Image& floorplan, const synth::Sample& photo_side,
               const RfConfig& cfg);

void write_heatmap_csv(const std::string& path, uint64_t seed, const Heatmap& map);
// diverging blue-white-red rendering, normalized to max |value|
void write_heatmap_png(const std::string& path, const Heatmap& map);

// 2x2 score matrix over object presence: entry [floorplan_state][photo_state]
// with state 1 = present, built via synthgen object toggling.
struct SensitivityMatrix {
  float cell[2][2] = {{0, 0}, {0, 0}};
  float matched_mean() const { return 0.5f * (cell[0][0] + cell[1][1]); }
  float mismatched_mean() const { return 0.5f * (cell[0][1] + cell[1][0]); }
};

SensitivityMatrix object_sensitivity(Matcher& model, const Apartment& apartment,
                                     const GeneratorSpec& spec, RoomType room, ObjectKind kind);

struct SimplifyConfig {
  float retention = 0.8f;  // stop when the best removal drops below this fraction
};

struct SimplifyResult {
  std::vector<int> removal_order;   // segment ids in removal order
  std::vector<int> survivors;       // remaining segment ids
  std::vector<float> score_trace;   // score after each committed removal (first = baseline)
};

// Greedy floorplan simplification: repeatedly blank the segment whose
// removal changes the score least (ties to the lowest segment id); stop
// when the best removal would drop the score below retention * current or
// one segment remains.
SimplifyResult simplify_localize(Matcher& model, const Apartment& apartment, RoomType photo_room,
                                 const SimplifyConfig& cfg = {});

// Photo placement: per room type, the window-center pixel of the rf_map
// argmax for that photo.
std::map<RoomType, std::pair<int, int>> place_photos(Matcher& model, const Image& floorplan,
                                                     const std::map<RoomType, Image>& photos,
                                                     const RfConfig& cfg);

struct RankedPhoto {
  int index = 0;
  float score = 0.0f;
};

// Corpus ranking by pair score, descending, stable for equal scores.
// top_n larger than the corpus returns the full ranking.
std::vector<RankedPhoto> retrieve(Matcher& model, const Image& floorplan,
                                  const std::vector<Image>& corpus, RoomType room_type,
                                  int top_n);

// Precomputed corpus features for repeated retrieval queries against the
// same corpus (pair matchers only).
class RetrievalIndex {
 public:
  RetrievalIndex(Matcher& model, const std::vector<Image>& corpus, RoomType room_type);
  std::vector<RankedPhoto> query(const Image& floorplan, int top_n) const;

 private:
  match::PairMatcherT<float>* matcher_;
  RoomType room_;
  nn::Tensor<float> corpus_features;  // [N, D]
};

}  // namespace floormatch::interp
