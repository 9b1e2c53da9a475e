#ifndef MSS_EVAL_HPP_
#define MSS_EVAL_HPP_

#include <span>
#include <string>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/image.hpp"
#include "mss/model.hpp"

namespace mss {

enum class ApMode { Voc11, Continuous };

struct PRPoint {
  double threshold = 0;
  double precision = 0;
  double recall = 0;
};

struct PRCurve {
  /// One point per detection, by descending score.
  std::vector<PRPoint> points;
  double ap = 0;
  double overlap = 0.5;
};

/// Pools detections over images, sorts by descending score (ties by image
/// index, then x1, y1) and matches greedily: a detection is a true positive
/// when the ground-truth box it overlaps most reaches `overlap` and is not
/// yet taken. Duplicates count as false positives. Voc11 averages the interpolated precision at recall
/// 0, 0.1, ..., 1; Continuous sums precision times recall increments.
PRCurve average_precision(std::span<const std::vector<Detection>> detections,
                          std::span<const std::vector<Box>> truth, double overlap = 0.5,
                          ApMode mode = ApMode::Voc11);

/// "threshold,precision,recall" rows and a final "AP,<value>" row.
std::string format_pr_csv(const PRCurve& curve);

struct ClassWeightShare {
  int cls = 0;
  bool populated = false;
  double pos_in = 0, pos_out = 0;  // fractions of the positive weight mass
  double neg_in = 0, neg_out = 0;  // fractions of the negative weight mass
};

struct WeightReport {
  std::vector<ClassWeightShare> classes;
  double mean_pos_in = 0, std_pos_in = 0;
  double mean_pos_out = 0, std_pos_out = 0;
  double mean_neg_in = 0, std_neg_in = 0;
  double mean_neg_out = 0, std_neg_out = 0;
  int excluded = 0;  // untrained classes left out of the aggregates
};

/// Splits each MSS class template w = w+ + w- and reports how much of each
/// part lies in the class's own level block versus the other levels.
WeightReport weight_analysis(const MssModel& model);
std::string format_weight_csv(const WeightReport& report);

struct ScaleSpread {
  std::vector<int> histogram;  // objects per best-fit level
  double entropy = 0;          // natural log
};

/// Best-fit level of every object (overlap_profile argmax at its centre).
ScaleSpread scale_spread(std::span<const std::vector<Box>> truth, const PyramidGeometry& geom, TemplateDims dims);

/// Per level block: for each template cell the largest positive weight over
/// channels, scaled so the block maximum is 1 (all zero if nothing is
/// positive). One image per level, template-cell resolution.
std::vector<Image> template_heatmap(const MssModel& model, int cls);

}  // namespace mss

#endif  // MSS_EVAL_HPP_
