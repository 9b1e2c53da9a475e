#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mss/error.hpp"
#include "mss/learning.hpp"

namespace mss {

std::vector<float> joint_feature_map(std::span<const float> psi, int y, int classes) {
  if (classes <= 0 || y < 0 || y >= classes) throw Error("joint_feature_map: class index out of range");
  std::vector<float> out(psi.size() * classes, 0.0f);
  std::copy(psi.begin(), psi.end(), out.begin() + static_cast<std::ptrdiff_t>(psi.size() * y));
  return out;
}

int perbox_loss(const CandidateLabel& candidate, std::span<const Box> truth, LossConvention convention) {
  if (convention == LossConvention::Literal) {
    if (candidate.background) return 0;
    return max_overlap(candidate.box, truth) < kScaleLabelOverlap ? 0 : 1;
  }
  if (candidate.background) return truth.empty() ? 0 : 1;
  return max_overlap(candidate.box, truth) >= kScaleLabelOverlap ? 0 : 1;
}

double averaged_loss(std::span<const CandidateLabel> candidates, std::span<const Box> truth,
                     LossConvention convention) {
  if (candidates.empty()) throw Error("averaged_loss needs at least one prediction");
  double sum = 0;
  for (const auto& c : candidates) sum += perbox_loss(c, truth, convention);
  return sum / static_cast<double>(candidates.size());
}

int loss_augmented_argmax(std::span<const double> scores, std::span<const double> losses) {
  if (scores.empty() || scores.size() != losses.size()) throw Error("loss_augmented_argmax: size mismatch");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] + losses[k] > scores[best] + losses[best]) best = k;
  return static_cast<int>(best);
}

namespace {

constexpr double kBiasFeature = 10.0;

// w = a * v, with a running sum of the iterates kept as c*v - u so that both
// the decay and the average cost O(1) per step outside the touched blocks.
struct ScaledWeights {
  std::vector<std::vector<double>> v;  // per class, view length + 1 (bias)
  std::vector<std::vector<double>> u;
  double a = 1.0;
  double c = 0.0;  // sum of a over averaged steps
  long long terms = 0;
  double vsq = 0.0;

  double score(int k, std::span<const float> x) const {
    const auto& vk = v[k];
    return a * (dot(std::span<const double>(vk).first(x.size()), x) + vk.back() * kBiasFeature);
  }
  // v_k += s * (x, bias)
  void add(int k, double s, std::span<const float> x) {
    auto& vk = v[k];
    auto& uk = u[k];
    double cross = 0, norm = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = s * x[j];
      cross += vk[j] * d;
      norm += d * d;
      vk[j] += d;
      uk[j] += c * d;
    }
    const double d = s * kBiasFeature;
    cross += vk.back() * d;
    norm += d * d;
    vk.back() += d;
    uk.back() += c * d;
    vsq += 2 * cross + norm;
  }
  void accumulate() {
    c += a;
    ++terms;
  }
  // Before any step is averaged this is the current iterate.
  std::vector<double> average(int k) const {
    std::vector<double> out(v[k].size());
    if (terms == 0) {
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = a * v[k][j];
      return out;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (c * v[k][j] - u[k][j]) / static_cast<double>(terms);
    return out;
  }
};

}  // namespace

SsvmResult train_ssvm(std::span<const TrainingSample> samples, const TrainConfig& config, const MssModel& shape) {
  config.validate();
  if (shape.family != Family::Mss) throw Error("structured training needs an MSS model shape");
  const int k_count = shape.classes;
  const std::size_t len = descriptor_length(shape);
  const std::size_t n = samples.size();
  bool any_neg = false;
  std::vector<int> class_pos(k_count, 0);
  for (const TrainingSample& s : samples) {
    if (s.descriptor.size() != len) throw Error("training sample has the wrong descriptor length");
    if (s.label.sign > 0) {
      for (int k = 0; k < k_count; ++k) class_pos[k] += s.label.has_scale(k) ? 1 : 0;
    } else {
      any_neg = true;
    }
  }
  SsvmResult result;
  for (int k = 0; k < k_count; ++k)
    if (class_pos[k] == 0) result.warnings.push_back("class " + std::to_string(k) + " has no positives");
  if (std::all_of(class_pos.begin(), class_pos.end(), [](int v) { return v == 0; }))
    throw Error("no class has positives to train on");
  if (!any_neg) throw Error("no negatives to train on");

  // Candidate losses per sample: classes 0..K-1, then background at index K.
  const auto geom = PyramidGeometry::standard(shape.levels, static_cast<int>(shape.cell_stride));
  std::vector<std::vector<double>> loss(n, std::vector<double>(k_count + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const TrainingSample& s = samples[i];
    std::span<const Box> truth;
    if (s.label.sign > 0) truth = s.truth.empty() ? std::span<const Box>(&s.label.box, 1) : std::span<const Box>(s.truth);
    for (int k = 0; k < k_count; ++k) {
      CandidateLabel c{false, box_for_scale(geom, shape.dims, s.source.cx, s.source.cy, k)};
      loss[i][k] = perbox_loss(c, truth, config.loss);
    }
    loss[i][k_count] = perbox_loss(CandidateLabel{}, truth, config.loss);
  }

  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  const double radius_sq = 1.0 / lambda;
  ScaledWeights w;
  w.v.assign(k_count, std::vector<double>(len + 1, 0.0));
  w.u = w.v;

  // Scores of every candidate under a weight accessor; background scores 0.
  std::vector<double> scores(k_count + 1);
  const auto score_all = [&](const TrainingSample& s, auto&& score_k) {
    for (int k = 0; k < k_count; ++k) scores[k] = class_pos[k] ? score_k(k, s.descriptor) : -1e300;
    scores[k_count] = 0.0;
  };
  // True label: the best-scoring hot class for positives, background otherwise.
  const auto truth_label = [&](const TrainingSample& s) {
    if (s.label.sign <= 0) return k_count;
    int best = -1;
    for (int k = 0; k < k_count; ++k)
      if (s.label.has_scale(k) && class_pos[k] && (best < 0 || scores[k] > scores[best])) best = k;
    return best < 0 ? k_count : best;
  };
  const auto augmented = [&](std::size_t i) { return loss_augmented_argmax(scores, loss[i]); };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  long long t = 0;
  for (int epoch = 0; epoch < config.ssvm_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (epoch == 1 || config.ssvm_epochs == 1) {
      // Average from the second epoch on; the first iterates are far off.
      for (int k = 0; k < k_count; ++k) std::fill(w.u[k].begin(), w.u[k].end(), 0.0);
      w.c = 0;
      w.terms = 0;
    }
    for (std::size_t i : order) {
      ++t;
      const TrainingSample& s = samples[i];
      score_all(s, [&](int k, std::span<const float> x) { return w.score(k, x); });
      const int y = truth_label(s);
      const int yb = augmented(i);
      if (t > 1) w.a *= 1.0 - 1.0 / static_cast<double>(t);
      const double violation = scores[yb] + loss[i][yb] - scores[y] - loss[i][y];
      if (yb != y && violation > 0) {
        const double step = 1.0 / (lambda * static_cast<double>(t));
        if (yb < k_count) w.add(yb, -step / w.a, s.descriptor);
        if (y < k_count) w.add(y, step / w.a, s.descriptor);
        const double norm_sq = w.a * w.a * w.vsq;
        if (norm_sq > radius_sq) w.a *= std::sqrt(radius_sq / norm_sq);
      }
      if (epoch >= 1 || config.ssvm_epochs == 1) w.accumulate();
    }

    // Objective of the averaged iterate.
    std::vector<std::vector<double>> avg(k_count);
    double wsq = 0;
    for (int k = 0; k < k_count; ++k) {
      avg[k] = w.average(k);
      for (double v : avg[k]) wsq += v * v;
    }
    double hinge = 0;
    for (std::size_t i = 0; i < n; ++i) {
      score_all(samples[i], [&](int k, std::span<const float> x) {
        return dot(std::span<const double>(avg[k]).first(x.size()), x) + avg[k].back() * kBiasFeature;
      });
      const int y = truth_label(samples[i]);
      const int yb = augmented(i);
      hinge += std::max(0.0, scores[yb] + loss[i][yb] - scores[y] - loss[i][y]);
    }
    result.objective.push_back(0.5 * lambda * wsq + hinge / static_cast<double>(n));
  }

  result.model = shape;
  for (int k = 0; k < k_count; ++k) {
    if (!class_pos[k]) {
      std::fill(result.model.weights[k].begin(), result.model.weights[k].end(), 0.0f);
      result.model.biases[k] = 0.0f;
      continue;
    }
    const auto avg = w.average(k);
    for (std::size_t j = 0; j < len; ++j) result.model.weights[k][j] = static_cast<float>(avg[j]);
    result.model.biases[k] = static_cast<float>(avg.back() * kBiasFeature);
  }
  return result;
}

}  // namespace mss
