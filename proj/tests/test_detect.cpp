#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mss/detect.hpp"
#include "mss/error.hpp"
#include "mss/scene.hpp"
#include "support.hpp"

using namespace mss;
using namespace mss::test;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fill_random(std::vector<float>& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0, 0.1f);
  for (float& v : w) v = n(rng);
}

// Level-0 cell centre in image coordinates.
double cell_center(const FeaturePyramid& p, int g) { return (g + 0.5) * p.cell_x; }

}  // namespace

TEST_CASE("zero model scores zero everywhere") {
  const Image img = random_image(96, 96, 1, 0, 1);
  const FeaturePyramid pyr = build_pyramid(img, 3, 8, Padding::Zero);
  const MssModel m = MssModel::zeros(Family::Mss, 3, 3, 31, {4, 4}, 8, Padding::Zero);
  const MssScores s = score_mss(pyr, m, -kInf, 1.0);
  CHECK(s.map.width == pyr.levels[0].width);
  CHECK(s.map.height == pyr.levels[0].height);
  for (double v : s.map.score) CHECK(v == 0.0);
  const FeaturePyramid rp = build_pyramid(img, 3, 8, Padding::Replicate);
  const MssModel b = MssModel::zeros(Family::Baseline, 1, 3, 31, {4, 4}, 8, Padding::Replicate);
  for (const auto& d : score_baseline(rp, b, -kInf)) CHECK(d.score == 0.0);
}

TEST_CASE("a correlation template peaks at its planted window") {
  FeaturePyramid pyr;
  pyr.levels.emplace_back(10, 10, 31);
  pyr.scales = {1.0};
  const TemplateDims dims{3, 3};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.1f, 1.0f);
  for (int y = 4; y < 7; ++y)
    for (int x = 3; x < 6; ++x)
      for (float& v : pyr.levels[0].cell(x, y)) v = u(rng);
  const std::vector<float> w = read_window(pyr, {3, 4, 0}, dims);
  const LevelScores ls = baseline_level_scores(pyr, 0, w, 0.0, dims);
  const auto it = std::max_element(ls.score.begin(), ls.score.end());
  const auto idx = static_cast<int>(it - ls.score.begin());
  CHECK(idx % ls.width == 3 + dims.width / 2);
  CHECK(idx / ls.width == 4 + dims.height / 2);
  CHECK(std::count(ls.score.begin(), ls.score.end(), *it) == 1);
}

TEST_CASE("mss with one nonzero block reduces to the baseline at that level") {
  const Image img = random_image(64, 64, 8, 0, 1);
  const FeaturePyramid pyr = build_pyramid(img, 5, 8, Padding::Zero);
  REQUIRE(pyr.level_count() == 5);
  const TemplateDims dims{3, 3};
  const auto geom = pyr.geometry();
  for (int s = 0; s < 5; ++s) {
    MssModel m = MssModel::zeros(Family::Mss, 1, 5, 31, dims, 8, Padding::Zero);
    std::vector<float> block(m.level_block(0));
    fill_random(block, 100 + s);
    std::copy(block.begin(), block.end(), m.weights[0].begin() + static_cast<std::ptrdiff_t>(s * block.size()));
    m.biases[0] = 0.25f;
    const MssScores ms = score_mss(pyr, m, -kInf, 1.0);
    double worst = 0;
    for (int gy = 0; gy < ms.map.height; ++gy)
      for (int gx = 0; gx < ms.map.width; ++gx) {
        const auto loc = map_location(geom, cell_center(pyr, gx), cell_center(pyr, gy), s, dims);
        const double base = score_window(pyr, loc, dims, block, 0.25);
        worst = std::max(worst, std::abs(ms.map.at(gx, gy) - base));
      }
    CHECK(worst <= 1e-9);
    if (s == 0) {
      // Level 0 scans the same grid, so the maps coincide entry by entry.
      const LevelScores ls = baseline_level_scores(pyr, 0, block, 0.25, dims);
      REQUIRE(ls.score.size() == ms.map.score.size());
      for (std::size_t i = 0; i < ls.score.size(); ++i) CHECK(ls.score[i] == ms.map.score[i]);
    }
  }
}

TEST_CASE("scores are linear in the weights") {
  const Image img = smooth_image(80, 80, 4);
  const FeaturePyramid pyr = build_pyramid(img, 3, 8, Padding::Zero);
  MssModel a = MssModel::zeros(Family::Mss, 1, 3, 31, {3, 3}, 8, Padding::Zero);
  MssModel b = a, sum = a;
  fill_random(a.weights[0], 1);
  fill_random(b.weights[0], 2);
  a.biases[0] = 0.5f;
  b.biases[0] = -0.25f;
  for (std::size_t j = 0; j < sum.weights[0].size(); ++j) sum.weights[0][j] = a.weights[0][j] + b.weights[0][j];
  sum.biases[0] = 0.25f;
  const auto sa = score_mss(pyr, a, -kInf, 1.0).map, sb = score_mss(pyr, b, -kInf, 1.0).map,
             ss = score_mss(pyr, sum, -kInf, 1.0).map;
  for (std::size_t i = 0; i < ss.score.size(); ++i) CHECK(std::abs(ss.score[i] - sa.score[i] - sb.score[i]) < 1e-5);
}

TEST_CASE("single-level score maps follow a one-cell shift") {
  const Image img = smooth_image(96, 96, 6);
  Image shifted(96, 96);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 96; ++x) shifted.at(x, y) = img.at(std::max(x - 8, 0), y);
  const FeaturePyramid p = build_pyramid(img, 1, 8, Padding::Zero);
  const FeaturePyramid q = build_pyramid(shifted, 1, 8, Padding::Zero);
  std::vector<float> w(3 * 3 * 31);
  fill_random(w, 9);
  const LevelScores a = baseline_level_scores(p, 0, w, 0, {3, 3});
  const LevelScores b = baseline_level_scores(q, 0, w, 0, {3, 3});
  // Windows reach one cell past the centre; HOG cells next to the border differ.
  for (int gy = 3; gy < a.height - 3; ++gy)
    for (int gx = 3; gx < a.width - 4; ++gx)
      CHECK(std::abs(a.score[gy * a.width + gx] - b.score[gy * b.width + gx + 1]) < 1e-5);
}

TEST_CASE("a one-level template pyramid matches the baseline") {
  const Image img = random_image(72, 64, 5, 0, 1);
  const FeaturePyramid pyr = build_pyramid(img, 1, 8, Padding::Zero);
  MssModel tp = MssModel::zeros(Family::TemplatePyramid, 1, 1, 31, {3, 4}, 8, Padding::Zero);
  MssModel base = MssModel::zeros(Family::Baseline, 1, 1, 31, {3, 4}, 8, Padding::Zero);
  fill_random(tp.weights[0], 12);
  tp.biases[0] = 0.1f;
  base.weights = tp.weights;
  base.biases = tp.biases;
  auto a = score_template_pyramid(pyr, tp, -kInf);
  auto b = score_baseline(pyr, base, -kInf);
  REQUIRE(a.size() == b.size());
  const auto key = [](const Detection& d) { return std::make_tuple(-d.score, d.box.x1, d.box.y1); };
  std::sort(a.begin(), a.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
  std::sort(b.begin(), b.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].score == b[i].score);
    CHECK(a[i].box == b[i].box);
  }
  CHECK_THROWS_AS(score_template_pyramid(pyr, base, 0), Error);
  CHECK_THROWS_AS(score_baseline(pyr, tp, 0), Error);
}

TEST_CASE("a template copied from a planted object selects its class") {
  SceneSpec spec;
  spec.mode = ContextMode::ContextFree;
  spec.width = spec.height = 192;
  spec.objects = {{96, 96, 2.0}};  // 64 px: level 2 for a 4x4 template
  const Scene scene = generate_scene(spec);
  const FeaturePyramid pyr = build_pyramid(scene.image, 3, 8, Padding::Zero);
  MssModel m = MssModel::zeros(Family::Mss, 3, 3, 31, {4, 4}, 8, Padding::Zero);
  m.weights[2] = read_multiscale(pyr, 96, 96, m.dims);
  const MssScores s = score_mss(pyr, m, -kInf, 0.5);
  CHECK(s.map.scale_at(11, 11) == 2);
  REQUIRE_FALSE(s.detections.empty());
  CHECK(s.detections[0].scale == 2);
  CHECK(overlap(s.detections[0].box, scene.boxes[0]) > 0.9);
}

TEST_CASE("detect is deterministic and honours the threshold") {
  const Image img = smooth_image(96, 80, 2);
  MssModel m = MssModel::zeros(Family::Mss, 2, 2, 31, {3, 3}, 8, Padding::Zero);
  fill_random(m.weights[0], 4);
  fill_random(m.weights[1], 5);
  const auto a = detect_image(img, m, {-kInf, 0.5});
  const auto b = detect_image(img, m, {-kInf, 0.5});
  REQUIRE(a.size() == b.size());
  REQUIRE_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].score == b[i].score);
    CHECK(a[i].box == b[i].box);
    if (i > 0) CHECK(a[i - 1].score >= a[i].score);
  }
  CHECK(detect_image(img, m, {kInf, 0.5}).empty());
  for (const auto& d : detect_image(img, m, {0.1, 0.5})) CHECK(d.score > 0.1);
}

TEST_CASE("scoring refuses a mismatched pyramid") {
  const Image img = smooth_image(96, 96, 3);
  const MssModel m = MssModel::zeros(Family::Mss, 3, 3, 31, {3, 3}, 8, Padding::Zero);
  CHECK_THROWS_AS(score_mss(build_pyramid(img, 3, 8, Padding::Replicate), m, 0), FingerprintMismatch);
  CHECK_THROWS_AS(score_mss(build_pyramid(img, 3, 6, Padding::Zero), m, 0), FingerprintMismatch);
  CHECK_THROWS_AS(score_mss(build_pyramid(img, 4, 8, Padding::Zero), m, 0), FingerprintMismatch);
  try {
    score_mss(build_pyramid(img, 4, 6, Padding::Replicate), m, 0);
    FAIL("expected refusal");
  } catch (const FingerprintMismatch& e) {
    CHECK(e.fields().size() >= 3);
  }
}

TEST_CASE("baseline skips levels smaller than the template") {
  const Image img = smooth_image(48, 48, 1);
  const FeaturePyramid pyr = build_pyramid(img, 5, 8, Padding::Replicate);
  const MssModel m = MssModel::zeros(Family::Baseline, 1, 5, 31, {5, 5}, 8, Padding::Replicate);
  std::vector<std::string> warnings;
  const auto dets = score_baseline(pyr, m, -kInf, &warnings);
  CHECK_FALSE(warnings.empty());
  for (const auto& d : dets) CHECK(d.scale < 2);
}

TEST_CASE("detection text round trip") {
  const std::vector<Detection> dets{{{1.5, 2, 30, 40.25}, 0.75, 2, 0}, {{0, 0, 8, 8}, -1.125, 0, 0}};
  const std::string text = format_detections("img_1", dets);
  const auto back = parse_detections(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].image_id == "img_1");
  CHECK(back[0].det.box == dets[0].box);
  CHECK(back[0].det.score == dets[0].score);
  CHECK(back[0].det.scale == 2);
  CHECK(back[1].det.score == dets[1].score);
  try {
    parse_detections(text + "img_2 0.5 1 2 3\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
}
