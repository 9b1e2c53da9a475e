#ifndef MSS_LABELS_HPP_
#define MSS_LABELS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/image.hpp"
#include "mss/pyramid.hpp"

namespace mss {

/// Overlap a scale-profile peak must reach to become a positive scale label.
inline constexpr double kScaleLabelOverlap = 0.6;

/// Label y = (class sign, box, per-level scale indicator).
struct SampleLabel {
  int sign = -1;
  Box box;
  std::vector<std::uint8_t> scales;

  bool has_scale(int s) const { return s < static_cast<int>(scales.size()) && scales[s] != 0; }
  /// Lowest hot level, or -1 for background.
  int first_scale() const;
};

enum class Provenance { Original, Virtual, Mined, Random };

struct SampleSource {
  int image_id = -1;
  double cx = 0;
  double cy = 0;
  Provenance provenance = Provenance::Original;
  int level = -1;  // pyramid level for single-level descriptors, else -1
};

struct TrainingSample {
  std::vector<float> descriptor;
  SampleLabel label;
  SampleSource source;
  /// Ground truth of the source image; structured training scores candidate
  /// boxes against it.
  std::vector<Box> truth;
};

/// Template size from the mean ground-truth box, in cells, at least 3x3.
TemplateDims model_dims(std::span<const Box> boxes, double cell_stride);

/// F(s): best overlap between the model-sized box centred on (cx, cy) at
/// level s and any ground-truth box, with both measured at that level.
std::vector<double> overlap_profile(std::span<const Box> truth, double cx, double cy, TemplateDims dims,
                                    const PyramidGeometry& geom);

/// Scale labels from a profile: 1 at local maxima reaching `threshold`.
/// Plateaus go to their coarsest level, so two adjacent levels are never both
/// set.
std::vector<std::uint8_t> threshold_profile(std::span<const double> profile,
                                            double threshold = kScaleLabelOverlap);

/// Level with the highest F (coarser level on ties).
int best_fit_level(std::span<const double> profile);

struct PositiveSet {
  std::vector<TrainingSample> samples;
  int skipped = 0;  // objects with no qualifying scale
};

/// One multi-scale positive per ground-truth object whose profile yields at
/// least one scale label, read at the object's centre.
PositiveSet extract_positives(int image_id, std::span<const Box> truth, const FeaturePyramid& pyr,
                              TemplateDims dims, Provenance provenance = Provenance::Original);

struct VirtualCopy {
  Image image;
  std::vector<Box> boxes;
  int level_shift = 0;
};

/// Level shifts used for virtual positives, in order.
std::vector<int> virtual_level_shifts(int count);

/// Resized copies of a training image that move each object's best-fit level
/// by the shifts above (resize factor 2^(shift/2)). Boxes whose shorter side
/// falls below `min_side` are dropped; a copy left with no boxes is skipped.
std::vector<VirtualCopy> virtual_positives(const Image& img, std::span<const Box> truth, int count,
                                           double min_side);

struct Annotation {
  std::string image;
  Box box;
  int class_id = 0;
};

/// One object per line: "image_path x1 y1 x2 y2 class_id"; '#' starts a
/// comment. Errors carry the 1-based line number as offset.
std::vector<Annotation> parse_annotations(std::string_view text);
std::string format_annotations(std::span<const Annotation> annotations);

}  // namespace mss

#endif  // MSS_LABELS_HPP_
