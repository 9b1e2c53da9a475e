#ifndef MSS_MODEL_HPP_
#define MSS_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/pyramid.hpp"

namespace mss {

/// Detector family a model was trained for.
///  - Mss: K classes over the S-level descriptor.
///  - Baseline: one single-level template scanned over every level.
///  - TemplatePyramid: K templates of growing size, all scored on level 0.
enum class Family : std::uint32_t { Mss = 0, Baseline = 1, TemplatePyramid = 2 };

std::string to_string(Family f);

struct MssModel {
  Family family = Family::Mss;
  FeatureKind kind = FeatureKind::Hog;
  int classes = 0;   // K
  int levels = 0;    // S
  int channels = 0;  // d
  TemplateDims dims;
  double cell_stride = 8;
  Padding padding = Padding::Zero;
  std::vector<std::vector<float>> weights;
  std::vector<float> biases;

  /// A model of the given shape with all weights and biases zero.
  static MssModel zeros(Family family, int classes, int levels, int channels, TemplateDims dims,
                        double cell_stride, Padding padding, FeatureKind kind = FeatureKind::Hog);

  /// Window size of class k. Template-pyramid classes grow by 2^(k/2).
  TemplateDims class_dims(int k) const;
  /// Weight count of class k.
  std::size_t block_length(int k) const;
  /// Length of one level's window for class k.
  std::size_t level_block(int k) const { return static_cast<std::size_t>(class_dims(k).cells()) * channels; }
  /// False for classes that never saw a positive (all-zero weights and bias).
  bool populated(int k) const;
  int populated_count() const;

  friend bool operator==(const MssModel&, const MssModel&) = default;
};

/// Hash of a pyramid's scale schedule (level count and scale values).
std::uint64_t schedule_hash(std::span<const double> scales);

/// Throws FingerprintMismatch listing every field where the pyramid differs
/// from what the model was trained on.
void check_fingerprint(const MssModel& model, const FeaturePyramid& pyr);

/// Scale schedule the model expects its pyramids to have.
std::vector<double> model_scales(const MssModel& model);

/// MSSM1 binary form: magic "MSSM1\0"; u32 K, S, d, tw, th, kind code,
/// padding code; f64 cell stride; then per class f32 bias and the f32 weight
/// block. The kind code holds the feature kind in its low byte and the family
/// in the next byte.
std::vector<std::uint8_t> encode_model(const MssModel& model);
MssModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const MssModel& model, const std::filesystem::path& path);
MssModel load_model(const std::filesystem::path& path);

}  // namespace mss

#endif  // MSS_MODEL_HPP_
