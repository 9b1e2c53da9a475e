#include "mss/learning.hpp"

#include <cmath>

#include "mss/error.hpp"
#include "mss/parallel.hpp"

namespace mss {

void TrainConfig::validate() const {
  if (!(c > 0) || !std::isfinite(c)) throw Error("C must be positive");
  if (!(tolerance > 0)) throw Error("tolerance must be positive");
  if (max_iterations <= 0) throw Error("max iterations must be positive");
  if (mining_rounds < 0 || initial_negatives < 0 || round_cap < 0)
    throw Error("mining counts must be non-negative");
  if (!(mining_overlap >= 0 && mining_overlap <= 1)) throw Error("mining overlap must be in [0,1]");
  if (ssvm_epochs <= 0) throw Error("ssvm epochs must be positive");
}

SdcaOptions TrainConfig::sdca() const {
  SdcaOptions o;
  o.c = c;
  o.max_iterations = max_iterations;
  o.tolerance = tolerance;
  o.seed = seed;
  return o;
}

std::span<const float> class_view(const MssModel& model, int k, std::span<const float> descriptor) {
  if (model.family != Family::TemplatePyramid) return descriptor;
  std::size_t offset = 0;
  for (int j = 0; j < k; ++j) offset += model.level_block(j);
  return descriptor.subspan(offset, model.level_block(k));
}

std::size_t descriptor_length(const MssModel& model) {
  if (model.family != Family::TemplatePyramid) return model.block_length(0);
  std::size_t n = 0;
  for (int k = 0; k < model.classes; ++k) n += model.level_block(k);
  return n;
}

OvaTrainer::OvaTrainer(MssModel shape, TrainConfig config) : shape_(std::move(shape)), config_(config) {
  config_.validate();
  alpha_.resize(shape_.classes);
}

MssModel OvaTrainer::train(std::span<const TrainingSample> positives, std::span<const TrainingSample> negatives) {
  const std::size_t len = descriptor_length(shape_);
  for (const auto* set : {&positives, &negatives})
    for (const TrainingSample& s : *set)
      if (s.descriptor.size() != len) throw Error("training sample has the wrong descriptor length");
  if (positives_ != 0 && positives.size() != positives_)
    throw Error("positive set changed between warm-started trainings");
  positives_ = positives.size();

  MssModel model = shape_;
  const int k_count = shape_.classes;
  std::vector<std::vector<int>> members(k_count);
  for (std::size_t i = 0; i < positives.size(); ++i)
    for (int k = 0; k < k_count; ++k)
      if (positives[i].label.sign > 0 && positives[i].label.has_scale(k)) members[k].push_back(static_cast<int>(i));

  warnings_.clear();
  stats_.assign(k_count, {});
  int trainable = 0;
  for (int k = 0; k < k_count; ++k) {
    if (members[k].empty()) warnings_.push_back("class " + std::to_string(k) + " has no positives; zero template");
    else ++trainable;
  }
  if (trainable == 0) throw Error("no class has positives to train on");
  if (negatives.empty()) throw Error("no negatives to train on");

  parallel_for(k_count, [&](int k) {
    if (members[k].empty()) return;
    std::vector<std::span<const float>> xs;
    std::vector<std::int8_t> ys;
    xs.reserve(members[k].size() + negatives.size());
    for (int i : members[k]) {
      xs.push_back(class_view(shape_, k, positives[i].descriptor));
      ys.push_back(1);
    }
    for (const TrainingSample& s : negatives) {
      xs.push_back(class_view(shape_, k, s.descriptor));
      ys.push_back(-1);
    }
    SdcaOptions opts = config_.sdca();
    opts.seed = config_.seed + static_cast<std::uint64_t>(k) * 0x9e3779b97f4a7c15ull;
    SdcaResult r = sdca_train(xs, ys, opts, alpha_[k]);
    auto& w = model.weights[k];
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<float>(r.w[j]);
    model.biases[k] = static_cast<float>(r.bias);
    alpha_[k] = r.alpha;
    stats_[k] = std::move(r);
  });
  return model;
}

MssModel train_ova(std::span<const TrainingSample> samples, const TrainConfig& config, const MssModel& shape,
                   std::vector<std::string>* warnings) {
  std::vector<TrainingSample> pos, neg;
  for (const TrainingSample& s : samples) (s.label.sign > 0 ? pos : neg).push_back(s);
  OvaTrainer trainer(shape, config);
  MssModel m = trainer.train(pos, neg);
  if (warnings) *warnings = trainer.warnings();
  return m;
}

}  // namespace mss
