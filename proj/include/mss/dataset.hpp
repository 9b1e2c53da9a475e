#ifndef MSS_DATASET_HPP_
#define MSS_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/image.hpp"
#include "mss/scene.hpp"

namespace mss {

struct Dataset {
  std::vector<std::string> names;
  std::vector<Image> images;
  std::vector<std::vector<Box>> boxes;

  std::size_t size() const { return images.size(); }
  Dataset subset(std::span<const int> indices) const;
  std::size_t object_count() const;
};

/// Scene spec plus the distribution random scenes are drawn from. Object
/// scales are log-uniform in [scale_min, scale_max]; a scene is empty with
/// probability empty_fraction, else holds objects_min..objects_max objects
/// that do not touch each other.
struct SynthSpec {
  SceneSpec scene;
  int objects_min = 1;
  int objects_max = 3;
  double scale_min = 1.0;
  double scale_max = 2.0;
  double empty_fraction = 0.2;
};

/// SceneSpec keys plus objects_min, objects_max, scale_min, scale_max,
/// empty_fraction.
SynthSpec parse_synth_spec(std::string_view text);
std::string format_synth_spec(const SynthSpec& spec);

/// `count` scenes named scene_0000, scene_0001, ...; deterministic in
/// spec.scene.seed.
Dataset synthesize(const SynthSpec& spec, int count);
/// Placements for scene i, as synthesize() draws them.
SceneSpec scene_spec_for(const SynthSpec& spec, int index);

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};
/// Seeded shuffle, first round(fraction * n) indices train. Both lists
/// sorted.
Split split_indices(int n, std::uint64_t seed, double train_fraction = 0.7);

/// Writes <name>.pgm per image, annotations.txt, train.txt and test.txt.
void save_dataset(const Dataset& data, const Split& split, const std::filesystem::path& dir);
/// Reads a directory written by save_dataset. `subset` is "train", "test"
/// or "all".
Dataset load_dataset(const std::filesystem::path& dir, std::string_view subset = "all");
/// Ground truth per image id from an annotation file.
std::vector<std::pair<std::string, std::vector<Box>>> load_truth(const std::filesystem::path& annotations);

}  // namespace mss

#endif  // MSS_DATASET_HPP_
