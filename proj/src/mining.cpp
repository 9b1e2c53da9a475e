#include "mss/mining.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "mss/error.hpp"
#include "mss/parallel.hpp"

namespace mss {

namespace {

TrainingSample negative(const MssModel& model, const MiningImage& img, int level, double cx, double cy,
                        Provenance provenance) {
  TrainingSample s;
  s.descriptor = window_descriptor(*img.pyramid, model, level, cx, cy);
  s.label.sign = -1;
  s.label.scales.assign(model.classes, 0);
  s.source = {img.id, cx, cy, provenance, level};
  s.truth.assign(img.truth.begin(), img.truth.end());
  return s;
}

bool clear_of_truth(std::span<const Box> boxes, std::span<const Box> truth, double limit) {
  return std::all_of(boxes.begin(), boxes.end(), [&](const Box& b) { return max_overlap(b, truth) < limit; });
}

}  // namespace

MiningRound mine_hard_negatives(const MssModel& model, std::span<const MiningImage> images,
                                const TrainConfig& config, MiningState& state, double nms_threshold) {
  struct Candidate {
    double score;
    int image;  // index into `images`
    int level, gx, gy;
    double cx, cy;
  };
  MiningRound out;
  out.detections.resize(images.size());
  std::vector<std::vector<Candidate>> found(images.size());
  parallel_for(static_cast<int>(images.size()), [&](int i) {
    const MiningImage& img = images[i];
    const auto geom = img.pyramid->geometry();
    const auto windows = scan(*img.pyramid, model);
    std::vector<Detection> dets;
    dets.reserve(windows.size());
    for (const WindowScore& w : windows) {
      Detection d;
      d.box = window_box(model, geom, w);
      d.score = w.score;
      d.scale = model.family == Family::Baseline ? w.level : w.cls;
      dets.push_back(d);
      if (!(w.score > config.mining_threshold)) continue;
      if (state.seen.count({img.id, w.level, w.gx, w.gy})) continue;
      if (!clear_of_truth(window_boxes(model, geom, w.level, w.cx, w.cy), img.truth, config.mining_overlap)) continue;
      found[i].push_back({w.score, i, w.level, w.gx, w.gy, w.cx, w.cy});
    }
    out.detections[i] = nms(std::move(dets), nms_threshold);
  });

  std::vector<Candidate> all;
  for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.image != b.image) return a.image < b.image;
    if (a.level != b.level) return a.level < b.level;
    if (a.gy != b.gy) return a.gy < b.gy;
    return a.gx < b.gx;
  });
  if (all.size() > static_cast<std::size_t>(config.round_cap)) all.resize(config.round_cap);

  const std::size_t before = state.pool.size();
  std::vector<TrainingSample> fresh(all.size());
  parallel_for(static_cast<int>(all.size()), [&](int j) {
    const Candidate& c = all[j];
    fresh[j] = negative(model, images[c.image], c.level, c.cx, c.cy, Provenance::Mined);
  });
  for (std::size_t j = 0; j < all.size(); ++j) {
    state.seen.insert({images[all[j].image].id, all[j].level, all[j].gx, all[j].gy});
    state.pool.push_back(std::move(fresh[j]));
  }
  out.additions = static_cast<int>(all.size());
  ++state.round;
  state.added.push_back(out.additions);
  if (static_cast<double>(out.additions) < 0.01 * static_cast<double>(before) || state.round >= config.mining_rounds)
    state.converged = true;
  return out;
}

void random_negatives(const MssModel& model, std::span<const MiningImage> images, const TrainConfig& config,
                      MiningState& state) {
  if (images.empty()) throw Error("no images to draw negatives from");
  const int want = config.initial_negatives;
  const int levels = model.levels;
  std::mt19937_64 rng(config.seed ^ 0x6e656761746976ull);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(images.size()) - 1);
  const long long max_draws = 100ll * std::max(want, 1);
  int taken = 0;
  // Scale-class boxes used by the acceptance rule, whatever the family.
  const auto class_geom = PyramidGeometry::standard(levels, static_cast<int>(model.cell_stride));
  for (long long draw = 0; draw < max_draws && taken < want; ++draw) {
    const MiningImage& img = images[pick(rng)];
    const FeatureMap& m0 = img.pyramid->levels.at(0);
    const int gx = std::uniform_int_distribution<int>(0, m0.width - 1)(rng);
    const int gy = std::uniform_int_distribution<int>(0, m0.height - 1)(rng);
    const int level = std::uniform_int_distribution<int>(0, levels - 1)(rng);
    double cx, cy;
    scan_center(img.pyramid->geometry(), model.dims, gx, gy, 0, cx, cy);
    std::vector<Box> boxes;
    for (int k = 0; k < levels; ++k) boxes.push_back(box_for_scale(class_geom, model.dims, cx, cy, k));
    if (!clear_of_truth(boxes, img.truth, config.mining_overlap)) continue;

    std::array<int, 4> key{img.id, -1, gx, gy};
    int use_level = -1;
    if (model.family == Family::Baseline) {
      const auto geom = img.pyramid->geometry();
      const auto loc = map_location(geom, cx, cy, level, model.dims);
      window_center(geom, loc, model.dims, cx, cy);
      key = {img.id, level, loc.x + model.dims.width / 2, loc.y + model.dims.height / 2};
      use_level = level;
    }
    if (!state.seen.insert(key).second) continue;
    state.pool.push_back(negative(model, img, use_level, cx, cy, Provenance::Random));
    ++taken;
  }
  state.added.push_back(taken);
}

}  // namespace mss
