#ifndef MSS_PIPELINE_HPP_
#define MSS_PIPELINE_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mss/dataset.hpp"
#include "mss/detect.hpp"
#include "mss/eval.hpp"
#include "mss/learning.hpp"
#include "mss/model.hpp"

namespace mss {

enum class DetectorKind { Baseline, TemplatePyramid, MssOva, MssSsvm };

std::string to_string(DetectorKind k);
/// "baseline", "template-pyramid", "mss-ova" or "mss-ssvm".
DetectorKind parse_detector_kind(std::string_view s);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::MssOva;
  int levels = 10;
  int cell_size = 8;
  /// Defaults to replicate padding for the baseline and zero padding for the
  /// multi-scale families.
  std::optional<Padding> padding;
  int virtual_count = 0;
  /// Template size in cells; defaults to the mean training box.
  std::optional<TemplateDims> template_dims;
  TrainConfig train;
  double nms = 0.5;

  Padding effective_padding() const;
};

/// One row per trained model.
struct RoundLog {
  int round = 0;
  std::size_t pool_size = 0;  // negatives the model was trained on
  int additions = 0;          // negatives added just before training it
  double train_ap = 0;
};

struct TrainOutcome {
  MssModel model;
  std::vector<MssModel> round_models;
  std::vector<RoundLog> log;
  std::vector<std::string> warnings;
  int positives = 0;
  int skipped_objects = 0;
};

/// Positive extraction (plus virtual copies), random negatives, training and
/// hard-negative mining until the pool converges or the round cap is hit.
/// `progress`, when set, receives each log row as it is produced.
TrainOutcome train_detector(const Dataset& train, const DetectorConfig& config,
                            const std::function<void(const RoundLog&)>& progress = {});

struct EvalResult {
  PRCurve curve;
  std::vector<std::vector<Detection>> detections;
};

/// Detects on every image (all scores down to `threshold`, NMS) and scores
/// against the dataset's ground truth.
EvalResult evaluate_model(const MssModel& model, const Dataset& data, double nms = 0.5,
                          double threshold = -std::numeric_limits<double>::infinity(),
                          ApMode mode = ApMode::Voc11, double overlap = 0.5);

/// CSV "round,pool_size,additions,train_ap".
std::string format_mining_log(const std::vector<RoundLog>& log);

}  // namespace mss

#endif  // MSS_PIPELINE_HPP_
