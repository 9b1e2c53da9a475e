#ifndef MSS_PYRAMID_HPP_
#define MSS_PYRAMID_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/hog.hpp"
#include "mss/image.hpp"

namespace mss {

/// How window reads treat cells outside a level's map.
enum class Padding : std::uint32_t { Zero = 0, Replicate = 1 };

enum class FeatureKind : std::uint32_t { Hog = 0, External = 1 };

std::string to_string(Padding p);
Padding parse_padding(const std::string& s);

/// Feature maps of S resampled copies of one image. Level s holds the
/// features of resize(img, scales[s]); padding is applied lazily at read time.
struct FeaturePyramid {
  std::vector<FeatureMap> levels;
  std::vector<double> scales;
  int cell_x = 8;
  int cell_y = 8;
  Padding padding = Padding::Zero;
  FeatureKind kind = FeatureKind::Hog;
  /// Set when build_pyramid produced fewer levels than requested.
  bool truncated = false;

  int level_count() const { return static_cast<int>(levels.size()); }
  int channels() const { return levels.empty() ? 0 : levels.front().channels; }
  PyramidGeometry geometry() const { return {cell_x, cell_y, scales}; }
};

/// Builds `levels` HOG levels at scales 2^(-s/2). Stops early (setting
/// `truncated`) at the first level with no full cell, or, when
/// `min_template` is given, with fewer cells than the template.
FeaturePyramid build_pyramid(const Image& img, int levels, int cell_size, Padding padding,
                             std::optional<TemplateDims> min_template = std::nullopt);

/// Copies the (dims.width x dims.height)-cell window anchored at `loc` into
/// `out` (size dims.cells() * d), row-major by cell, channel-minor. Cells
/// outside the map are zero or clamped to the nearest edge cell.
void read_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims,
                 std::span<float> out, Padding padding);
inline void read_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims,
                        std::span<float> out) {
  read_window(pyr, loc, dims, out, pyr.padding);
}
std::vector<float> read_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims);

/// Multi-scale descriptor: windows centred on (cx, cy) at every level,
/// concatenated level 0 first. Length = dims.cells() * d * S.
void read_multiscale(const FeaturePyramid& pyr, double cx, double cy, TemplateDims dims,
                     std::span<float> out);
std::vector<float> read_multiscale(const FeaturePyramid& pyr, double cx, double cy, TemplateDims dims);

/// MSSFP binary form: magic "MSSFP1\0"; u32 S, d, cx, cy, padding; per level
/// u32 width, u32 height, f64 scale, then width*height*d f32. Little-endian.
std::vector<std::uint8_t> encode_pyramid(const FeaturePyramid& pyr);
FeaturePyramid decode_pyramid(std::span<const std::uint8_t> bytes);
void export_pyramid(const FeaturePyramid& pyr, const std::filesystem::path& path);
FeaturePyramid import_pyramid(const std::filesystem::path& path);

}  // namespace mss

#endif  // MSS_PYRAMID_HPP_
