#ifndef MSS_MINING_HPP_
#define MSS_MINING_HPP_

#include <array>
#include <set>
#include <span>
#include <vector>

#include "mss/detect.hpp"
#include "mss/labels.hpp"
#include "mss/learning.hpp"

namespace mss {

/// A training image as mining sees it.
struct MiningImage {
  int id = 0;
  const FeaturePyramid* pyramid = nullptr;
  std::span<const Box> truth;
};

struct MiningState {
  int round = 0;
  std::vector<TrainingSample> pool;
  /// Negatives added per round; entry 0 is the initial random pool.
  std::vector<int> added;
  bool converged = false;
  /// (image, level, gx, gy) of every window already in the pool.
  std::set<std::array<int, 4>> seen;
};

struct MiningRound {
  int additions = 0;
  /// Per image, every scanned window as a detection after NMS. The mining
  /// pass doubles as a train-set evaluation of the model.
  std::vector<std::vector<Detection>> detections;
};

/// Scans every window of every image. Windows scoring above the mining
/// threshold whose boxes all overlap every ground-truth box less than the
/// mining overlap are candidates; the highest-scoring ones not yet in the
/// pool are added, up to the per-round cap. Marks the state converged when
/// the additions are below 1% of the pool or the round cap is reached.
MiningRound mine_hard_negatives(const MssModel& model, std::span<const MiningImage> images,
                                const TrainConfig& config, MiningState& state, double nms_threshold = 0.5);

/// Draws `config.initial_negatives` random background windows into an empty
/// state. A draw picks an image, a level-0 cell and a level; it is kept when
/// every scale-class box at that cell overlaps all ground truth less than the
/// mining overlap. Single-level models read the drawn level; the others
/// ignore it, so every family samples the same image locations.
void random_negatives(const MssModel& model, std::span<const MiningImage> images, const TrainConfig& config,
                      MiningState& state);

}  // namespace mss

#endif  // MSS_MINING_HPP_
