#ifndef MSS_LEARNING_HPP_
#define MSS_LEARNING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mss/labels.hpp"
#include "mss/model.hpp"
#include "mss/sdca.hpp"

namespace mss {

/// Which form of the per-box loss structured training uses. Corrected gives
/// loss 0 to candidates equivalent to the truth; Literal keeps the printed
/// form, which gives loss 0 whenever the candidate overlaps the truth < 0.6.
enum class LossConvention { Corrected, Literal };

struct TrainConfig {
  double c = 0.01;
  long long max_iterations = 5'000'000;
  double tolerance = 1e-7;
  int mining_rounds = 5;
  int initial_negatives = 5000;
  int round_cap = 5000;
  double mining_overlap = 0.3;
  double mining_threshold = -1.0;
  std::uint64_t seed = 0;
  int ssvm_epochs = 20;
  LossConvention loss = LossConvention::Corrected;

  /// Throws Error when a field is out of range.
  void validate() const;
  SdcaOptions sdca() const;
};

/// The part of a sample descriptor class k is trained and scored on. For
/// template-pyramid models the descriptor is the concatenation of every
/// class's level-0 window; other families use the whole descriptor.
std::span<const float> class_view(const MssModel& model, int k, std::span<const float> descriptor);
/// Descriptor length a model expects from training samples.
std::size_t descriptor_length(const MssModel& model);

/// One-vs-all training with warm starts. Positives are fixed at the first
/// call; negatives form an append-only pool so dual variables carry over
/// between mining rounds by index.
class OvaTrainer {
 public:
  OvaTrainer(MssModel shape, TrainConfig config);
  /// Class k trains on positives with scale label k against every negative.
  /// Classes without positives keep a zero template and add a warning.
  MssModel train(std::span<const TrainingSample> positives, std::span<const TrainingSample> negatives);
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Solver statistics of the last train() call, one per class (empty for
  /// classes without positives).
  const std::vector<SdcaResult>& stats() const { return stats_; }

 private:
  MssModel shape_;
  TrainConfig config_;
  std::vector<std::vector<double>> alpha_;
  std::vector<std::string> warnings_;
  std::vector<SdcaResult> stats_;
  std::size_t positives_ = 0;
};

/// Single-shot OVA training; `samples` holds positives and negatives mixed.
MssModel train_ova(std::span<const TrainingSample> samples, const TrainConfig& config, const MssModel& shape,
                   std::vector<std::string>* warnings = nullptr);

/// Phi(psi, y): K blocks of len(psi), block y = psi, others zero.
std::vector<float> joint_feature_map(std::span<const float> psi, int y, int classes);

/// Output label of a structured prediction: background, or a box.
struct CandidateLabel {
  bool background = true;
  Box box;
};

int perbox_loss(const CandidateLabel& candidate, std::span<const Box> truth,
                LossConvention convention = LossConvention::Corrected);
double averaged_loss(std::span<const CandidateLabel> candidates, std::span<const Box> truth,
                     LossConvention convention = LossConvention::Corrected);

/// Loss-augmented inference over K classes plus background. `scores` and
/// `losses` have K+1 entries with background last; ties go to the lowest
/// index.
int loss_augmented_argmax(std::span<const double> scores, std::span<const double> losses);

struct SsvmResult {
  MssModel model;
  /// Objective of the averaged iterate at the end of each epoch, in units of
  /// (lambda/2)|w|^2 + (1/n) sum of margin-rescaled hinge terms.
  std::vector<double> objective;
  std::vector<std::string> warnings;
};

/// Joint training of all K classes against background by averaged
/// stochastic subgradient on the margin-rescaled hinge. Needs an MSS-family
/// shape; candidate class boxes come from the standard scale schedule.
SsvmResult train_ssvm(std::span<const TrainingSample> samples, const TrainConfig& config, const MssModel& shape);

}  // namespace mss

#endif  // MSS_LEARNING_HPP_
