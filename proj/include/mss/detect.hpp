#ifndef MSS_DETECT_HPP_
#define MSS_DETECT_HPP_

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/image.hpp"
#include "mss/model.hpp"
#include "mss/pyramid.hpp"

namespace mss {

/// Best score and its class per level-0 cell.
struct ScoreMap {
  int width = 0;
  int height = 0;
  std::vector<double> score;
  std::vector<int> scale;
  double at(int x, int y) const { return score[static_cast<std::size_t>(y) * width + x]; }
  int scale_at(int x, int y) const { return scale[static_cast<std::size_t>(y) * width + x]; }
};

/// One scanned window. Single-level families scan (level, gx, gy) with gx,
/// gy the cell holding the window centre; the others scan level-0 cells and
/// report level -1.
struct WindowScore {
  double score = 0;
  int cls = 0;
  int level = -1;
  int gx = 0;
  int gy = 0;
  double cx = 0;
  double cy = 0;
};

/// bias + w . window at `loc`.
double score_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims, std::span<const float> w,
                    double bias);

/// Image-space centre of scan cell (gx, gy) at level s, for a template of
/// `dims`: the window anchored at (gx - floor(tw/2), gy - floor(th/2)).
void scan_center(const PyramidGeometry& geom, TemplateDims dims, int gx, int gy, int s, double& cx, double& cy);

/// Scores of one level for a single template, indexed like the scan grid.
struct LevelScores {
  int width = 0;
  int height = 0;
  std::vector<double> score;
};
LevelScores baseline_level_scores(const FeaturePyramid& pyr, int s, std::span<const float> w, double bias,
                                  TemplateDims dims);

/// Every window the model scores in `pyr`, with its best populated class.
/// Checks the fingerprint first. Baseline levels smaller than the template
/// are skipped, with a note in `warnings`.
std::vector<WindowScore> scan(const FeaturePyramid& pyr, const MssModel& model,
                              std::vector<std::string>* warnings = nullptr);

/// Boxes a scanned window stands for: one per class (MSS, template pyramid)
/// or the window itself (baseline, at `level`).
std::vector<Box> window_boxes(const MssModel& model, const PyramidGeometry& geom, int level, double cx, double cy);
/// Box of the window's chosen class.
Box window_box(const MssModel& model, const PyramidGeometry& geom, const WindowScore& w);

/// Training descriptor of the window at (level, cx, cy); level is ignored by
/// the multi-scale families.
std::vector<float> window_descriptor(const FeaturePyramid& pyr, const MssModel& model, int level, double cx,
                                     double cy);

std::vector<Detection> score_baseline(const FeaturePyramid& pyr, const MssModel& model, double threshold,
                                      std::vector<std::string>* warnings = nullptr);
std::vector<Detection> score_template_pyramid(const FeaturePyramid& pyr, const MssModel& model, double threshold);

struct MssScores {
  ScoreMap map;
  std::vector<Detection> detections;
};
/// Score map over level-0 cells and the detections above `threshold` after
/// NMS.
MssScores score_mss(const FeaturePyramid& pyr, const MssModel& model, double threshold, double nms_threshold = 0.5);

struct DetectOptions {
  double threshold = 0.0;
  double nms = 0.5;
};

/// Family dispatch, thresholding and NMS. Sorted by descending score.
std::vector<Detection> detect(const FeaturePyramid& pyr, const MssModel& model, const DetectOptions& options);
/// Builds the pyramid the model expects and runs detect().
std::vector<Detection> detect_image(const Image& img, const MssModel& model, const DetectOptions& options);
/// Pyramid matching a model's configuration.
FeaturePyramid pyramid_for_model(const Image& img, const MssModel& model);

struct ImageDetection {
  std::string image_id;
  Detection det;
};
/// Lines "image_id score x1 y1 x2 y2 scale_idx".
std::string format_detections(std::string_view image_id, std::span<const Detection> dets);
/// ParseError offsets are 1-based line numbers.
std::vector<ImageDetection> parse_detections(std::string_view text);

}  // namespace mss

#endif  // MSS_DETECT_HPP_
