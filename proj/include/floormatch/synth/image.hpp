#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace floormatch::synth {

// 8-bit raster, 1 (grayscale) or 3 (RGB) interleaved channels. All generator
// output is quantized to this type, so a PNG round-trip is lossless and
// regenerating from seed agrees bit-for-bit with loading from disk.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<size_t>(w) * h * c, fill) {}

  uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Image& o) const = default;
};

void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

// Indexed PNG used for segment masks: one byte per pixel, value = segment id.
void write_indexed_png(const std::string& path, int width, int height,
                       const std::vector<uint8_t>& indices);
std::vector<uint8_t> read_indexed_png(const std::string& path, int& width, int& height);

}  // namespace floormatch::synth
