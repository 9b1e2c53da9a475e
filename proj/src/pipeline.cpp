#include "mss/pipeline.hpp"

#include <cstdio>

#include "mss/error.hpp"
#include "mss/hog.hpp"
#include "mss/labels.hpp"
#include "mss/mining.hpp"
#include "mss/parallel.hpp"

namespace mss {

std::string to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::Baseline: return "baseline";
    case DetectorKind::TemplatePyramid: return "template-pyramid";
    case DetectorKind::MssOva: return "mss-ova";
    case DetectorKind::MssSsvm: return "mss-ssvm";
  }
  return "unknown";
}

DetectorKind parse_detector_kind(std::string_view s) {
  if (s == "baseline") return DetectorKind::Baseline;
  if (s == "template-pyramid") return DetectorKind::TemplatePyramid;
  if (s == "mss-ova" || s == "mss") return DetectorKind::MssOva;
  if (s == "mss-ssvm") return DetectorKind::MssSsvm;
  throw Error("unknown detector family '" + std::string(s) + "'");
}

Padding DetectorConfig::effective_padding() const {
  if (padding) return *padding;
  return kind == DetectorKind::Baseline ? Padding::Replicate : Padding::Zero;
}

namespace {

MssModel make_shape(const DetectorConfig& cfg, TemplateDims dims) {
  const Padding pad = cfg.effective_padding();
  switch (cfg.kind) {
    case DetectorKind::Baseline:
      return MssModel::zeros(Family::Baseline, 1, cfg.levels, kHogChannels, dims, cfg.cell_size, pad);
    case DetectorKind::TemplatePyramid:
      return MssModel::zeros(Family::TemplatePyramid, cfg.levels, cfg.levels, kHogChannels, dims, cfg.cell_size, pad);
    case DetectorKind::MssOva:
    case DetectorKind::MssSsvm:
      return MssModel::zeros(Family::Mss, cfg.levels, cfg.levels, kHogChannels, dims, cfg.cell_size, pad);
  }
  throw Error("unknown detector family");
}

int pyramid_levels(const MssModel& shape) { return shape.family == Family::TemplatePyramid ? 1 : shape.levels; }

// Positives of one image for the model's family. Baseline positives are one
// single-level sample per hot level.
void add_positives(const MssModel& shape, const FeaturePyramid& pyr, int image_id, std::span<const Box> truth,
                   Provenance provenance, std::vector<TrainingSample>& out, int& skipped) {
  const auto geom = PyramidGeometry::standard(shape.levels, static_cast<int>(shape.cell_stride));
  for (const Box& b : truth) {
    const double cx = b.center_x(), cy = b.center_y();
    auto scales = threshold_profile(overlap_profile(truth, cx, cy, shape.dims, geom));
    if (std::none_of(scales.begin(), scales.end(), [](auto v) { return v != 0; })) {
      ++skipped;
      continue;
    }
    if (shape.family != Family::Baseline) {
      TrainingSample s;
      s.descriptor = window_descriptor(pyr, shape, -1, cx, cy);
      s.label = {+1, b, std::move(scales)};
      s.source = {image_id, cx, cy, provenance, -1};
      s.truth.assign(truth.begin(), truth.end());
      out.push_back(std::move(s));
      continue;
    }
    for (int lv = 0; lv < shape.levels; ++lv) {
      if (!scales[lv]) continue;
      TrainingSample s;
      s.descriptor = window_descriptor(pyr, shape, lv, cx, cy);
      s.label = {+1, b, {1}};
      s.source = {image_id, cx, cy, provenance, lv};
      s.truth.assign(truth.begin(), truth.end());
      out.push_back(std::move(s));
    }
  }
}

std::vector<FeaturePyramid> build_all(const std::vector<Image>& images, const MssModel& shape) {
  std::vector<FeaturePyramid> out(images.size());
  parallel_for(static_cast<int>(images.size()), [&](int i) { out[i] = pyramid_for_model(images[i], shape); });
  return out;
}

double train_ap(const std::vector<std::vector<Detection>>& dets, const Dataset& data) {
  if (data.object_count() == 0) return 0.0;
  return average_precision(dets, data.boxes).ap;
}

}  // namespace

TrainOutcome train_detector(const Dataset& train, const DetectorConfig& cfg,
                            const std::function<void(const RoundLog&)>& progress) {
  cfg.train.validate();
  if (cfg.levels <= 0 || cfg.cell_size <= 0) throw Error("levels and cell size must be positive");
  if (train.size() == 0) throw Error("empty training set");
  std::vector<Box> all_boxes;
  for (const auto& b : train.boxes) all_boxes.insert(all_boxes.end(), b.begin(), b.end());
  if (all_boxes.empty()) throw Error("no trainable positives: the training set has no annotated objects");
  const TemplateDims dims = cfg.template_dims ? *cfg.template_dims : model_dims(all_boxes, cfg.cell_size);
  const MssModel shape = make_shape(cfg, dims);

  TrainOutcome out;
  const auto pyramids = build_all(train.images, shape);

  std::vector<TrainingSample> positives;
  for (std::size_t i = 0; i < train.size(); ++i)
    add_positives(shape, pyramids[i], static_cast<int>(i), train.boxes[i], Provenance::Original, positives,
                  out.skipped_objects);
  if (cfg.virtual_count > 0) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train.boxes[i].empty()) continue;
      for (const auto& copy : virtual_positives(train.images[i], train.boxes[i], cfg.virtual_count, cfg.cell_size)) {
        const FeaturePyramid vp = build_pyramid(copy.image, pyramid_levels(shape), cfg.cell_size, shape.padding);
        if (vp.truncated) continue;
        int dropped = 0;
        add_positives(shape, vp, static_cast<int>(i), copy.boxes, Provenance::Virtual, positives, dropped);
      }
    }
  }
  if (positives.empty()) throw Error("no trainable positives: no object has a qualifying scale label");
  out.positives = static_cast<int>(positives.size());
  if (out.skipped_objects > 0)
    out.warnings.push_back(std::to_string(out.skipped_objects) + " objects had no scale label and were skipped");

  std::vector<MiningImage> images(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) images[i] = {static_cast<int>(i), &pyramids[i], train.boxes[i]};

  MiningState state;
  random_negatives(shape, images, cfg.train, state);
  if (state.pool.empty()) throw Error("could not draw any background negatives");

  OvaTrainer ova(shape, cfg.train);
  const auto fit = [&]() -> MssModel {
    if (cfg.kind == DetectorKind::MssSsvm) {
      std::vector<TrainingSample> all = positives;
      all.insert(all.end(), state.pool.begin(), state.pool.end());
      SsvmResult r = train_ssvm(all, cfg.train, shape);
      for (auto& w : r.warnings) out.warnings.push_back(std::move(w));
      return std::move(r.model);
    }
    MssModel m = ova.train(positives, state.pool);
    for (const auto& w : ova.warnings()) out.warnings.push_back(w);
    return m;
  };

  MssModel model = fit();
  int additions = state.added.back();
  for (;;) {
    TrainConfig round_cfg = cfg.train;
    const bool collect = state.round < cfg.train.mining_rounds && !state.converged;
    if (!collect) round_cfg.round_cap = 0;
    const std::size_t pool_before = state.pool.size();
    MiningState probe;  // scan-only pass when no more rounds are allowed
    MiningRound scan_result =
        mine_hard_negatives(model, images, round_cfg, collect ? state : probe, cfg.nms);
    RoundLog row{static_cast<int>(out.log.size()), pool_before, additions, train_ap(scan_result.detections, train)};
    out.log.push_back(row);
    out.round_models.push_back(model);
    if (progress) progress(row);
    if (!collect || scan_result.additions == 0) break;
    additions = scan_result.additions;
    model = fit();
  }
  out.model = std::move(model);
  // Warnings repeat once per retraining; keep the distinct ones.
  std::vector<std::string> unique;
  for (auto& w : out.warnings)
    if (std::find(unique.begin(), unique.end(), w) == unique.end()) unique.push_back(std::move(w));
  out.warnings = std::move(unique);
  return out;
}

EvalResult evaluate_model(const MssModel& model, const Dataset& data, double nms_threshold, double threshold,
                          ApMode mode, double overlap_req) {
  EvalResult out;
  out.detections.resize(data.size());
  const DetectOptions opts{threshold, nms_threshold};
  parallel_for(static_cast<int>(data.size()),
               [&](int i) { out.detections[i] = detect_image(data.images[i], model, opts); });
  out.curve = average_precision(out.detections, data.boxes, overlap_req, mode);
  return out;
}

std::string format_mining_log(const std::vector<RoundLog>& log) {
  std::string out = "round,pool_size,additions,train_ap\n";
  char buf[128];
  for (const RoundLog& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%d,%.6f\n", r.round, r.pool_size, r.additions, r.train_ap);
    out += buf;
  }
  return out;
}

}  // namespace mss
