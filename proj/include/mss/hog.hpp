#ifndef MSS_HOG_HPP_
#define MSS_HOG_HPP_

#include <span>
#include <vector>

#include "mss/image.hpp"

namespace mss {

/// Dense per-cell feature array, row-major by cell, channel-minor.
struct FeatureMap {
  int width = 0;     // cells
  int height = 0;    // cells
  int channels = 0;  // d
  std::vector<float> values;

  FeatureMap() = default;
  FeatureMap(int w, int h, int d)
      : width(w), height(h), channels(d), values(static_cast<std::size_t>(w) * h * d, 0.0f) {}

  std::span<const float> cell(int x, int y) const {
    return {values.data() + (static_cast<std::size_t>(y) * width + x) * channels,
            static_cast<std::size_t>(channels)};
  }
  std::span<float> cell(int x, int y) {
    return {values.data() + (static_cast<std::size_t>(y) * width + x) * channels,
            static_cast<std::size_t>(channels)};
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

// Channel layout of the 31-dimensional HOG cell:
//   [0, 18)  contrast-sensitive orientations, 20 degrees apart starting at 0
//   [18, 27) contrast-insensitive orientations (opposite sensitive bins merged)
//   [27, 31) gradient energy under each of the four normalising blocks
inline constexpr int kHogChannels = 31;
inline constexpr int kSensitiveBins = 18;
inline constexpr int kInsensitiveBins = 9;
inline constexpr float kHogClip = 0.2f;
inline constexpr double kHogEpsilon = 1e-10;

/// Unnormalised 18-bin orientation histograms (one FeatureMap channel per
/// bin). Gradients are centred differences with edge clamping; each pixel
/// votes bilinearly into its two nearest orientation bins and four nearest
/// cells.
FeatureMap hog_histograms(const Image& img, int cell_size);

/// 31-channel HOG. Cells = floor(image dims / cell_size). Block energies of
/// cells outside the map are taken from the nearest edge cell.
FeatureMap extract_hog(const Image& img, int cell_size);

}  // namespace mss

#endif  // MSS_HOG_HPP_
