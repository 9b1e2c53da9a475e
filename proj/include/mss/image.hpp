#ifndef MSS_IMAGE_HPP_
#define MSS_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mss {

/// Single-channel raster with luminance values in [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Decodes a binary PGM (P5) or PPM (P6). PPM is reduced to luminance with
/// the Rec. 601 weights. Throws ParseError with the failing byte offset.
Image decode_pnm(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

/// P5 with maxval 255. Values are clamped to [0,1] and rounded to 8 bits.
std::vector<std::uint8_t> encode_pgm(const Image& img);
void save_pgm(const Image& img, const std::filesystem::path& path);

/// Resamples by `factor` with pixel centres aligned at half-pixel offsets.
/// Output dims are round(input dims * factor), at least 1. Upsampling is plain
/// bilinear interpolation; when shrinking, the triangle kernel is widened by
/// 1/factor so every source pixel contributes.
Image resize(const Image& img, double factor);

/// Mirror image about the vertical axis.
Image flip_horizontal(const Image& img);

}  // namespace mss

#endif  // MSS_IMAGE_HPP_
