#include <doctest.h>

#include <cmath>
#include <random>

#include "mss/error.hpp"
#include "mss/labels.hpp"
#include "mss/scene.hpp"
#include "support.hpp"

using namespace mss;
using mss::test::random_image;

TEST_CASE("model_dims from mean boxes") {
  const std::vector<Box> one{{0, 0, 80, 40}};
  CHECK(model_dims(one, 8) == TemplateDims{10, 5});
  const std::vector<Box> two{{0, 0, 80, 40}, {0, 0, 160, 80}};
  const TemplateDims d = model_dims(two, 8);
  CHECK(d.width == 15);
  CHECK(d.height == 8);  // 60 / 8 = 7.5 rounds up
  const std::vector<Box> tiny{{0, 0, 4, 4}};
  CHECK(model_dims(tiny, 8) == TemplateDims{3, 3});
  CHECK_THROWS_AS(model_dims(std::vector<Box>{}, 8), Error);
}

TEST_CASE("overlap profile peaks at the matching level") {
  const auto g = PyramidGeometry::standard(6, 8);
  const TemplateDims dims{4, 4};
  const std::vector<Box> truth{Box::centered(100, 100, 64, 64)};  // model size at level 2
  const auto f = overlap_profile(truth, 100, 100, dims, g);
  CHECK(f[2] == doctest::Approx(1.0));
  for (int s = 0; s < 2; ++s) CHECK(f[s] < f[s + 1]);
  for (int s = 2; s < 5; ++s) CHECK(f[s] > f[s + 1]);
  for (double v : f) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("two nested objects give two peaks") {
  const auto g = PyramidGeometry::standard(7, 8);
  const TemplateDims dims{4, 4};
  const double s1 = 32 / level_scale(1), s4 = 32 / level_scale(4);
  const std::vector<Box> truth{Box::centered(150, 150, s1, s1), Box::centered(150, 150, s4, s4)};
  const auto f = overlap_profile(truth, 150, 150, dims, g);
  // Direct computation for each level.
  for (int s = 0; s < 7; ++s) {
    const double side = 32 / level_scale(s);
    double want = 0;
    for (const Box& t : truth) want = std::max(want, overlap(Box::centered(150, 150, side, side), t));
    CHECK(f[s] == doctest::Approx(want));
  }
  const auto y = threshold_profile(f);
  CHECK(y == std::vector<std::uint8_t>{0, 1, 0, 0, 1, 0, 0});
}

TEST_CASE("threshold_profile examples") {
  CHECK(threshold_profile(std::vector<double>{0.2, 0.7, 0.3, 0.1, 0.1, 0.1, 0.1}) ==
        std::vector<std::uint8_t>{0, 1, 0, 0, 0, 0, 0});
  CHECK(threshold_profile(std::vector<double>{0.5, 0.59, 0.3}) == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(threshold_profile(std::vector<double>{0.65, 0.9, 0.65}) == std::vector<std::uint8_t>{0, 1, 0});
  // Plateau goes to the coarser level.
  CHECK(threshold_profile(std::vector<double>{0.3, 0.8, 0.8, 0.2}) == std::vector<std::uint8_t>{0, 0, 1, 0});
  CHECK(threshold_profile(std::vector<double>{0.9}) == std::vector<std::uint8_t>{1});
}

TEST_CASE("thresholded profiles never have adjacent ones") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> q(0, 10);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> f(7);
    for (double& v : f) v = q(rng) / 10.0;  // coarse values force plateaus
    const auto y = threshold_profile(f);
    for (int s = 0; s + 1 < 7; ++s) CHECK_FALSE((y[s] && y[s + 1]));
    for (int s = 0; s < 7; ++s)
      if (y[s]) CHECK(f[s] >= 0.6);
  }
}

TEST_CASE("best_fit_level prefers the coarser level on ties") {
  CHECK(best_fit_level(std::vector<double>{0.1, 0.8, 0.3}) == 1);
  CHECK(best_fit_level(std::vector<double>{0.1, 0.8, 0.8}) == 2);
}

TEST_CASE("extract_positives labels by object size") {
  SceneSpec spec;
  spec.mode = ContextMode::ContextFree;
  spec.width = spec.height = 256;
  const TemplateDims dims{4, 4};

  spec.objects = {{128, 128, 1.0}};  // 32 px: model size at level 0
  Scene s = generate_scene(spec);
  FeaturePyramid p = build_pyramid(s.image, 6, 8, Padding::Zero);
  PositiveSet pos = extract_positives(0, s.boxes, p, dims);
  REQUIRE(pos.samples.size() == 1);
  CHECK(pos.samples[0].label.scales[0] == 1);
  CHECK(pos.samples[0].label.sign == 1);
  CHECK(pos.samples[0].descriptor.size() == 6u * 16 * 31);
  CHECK(pos.samples[0].descriptor == read_multiscale(p, 128, 128, dims));

  spec.objects = {{128, 128, 4.0}};  // 128 px: scale 1/4, level 4
  s = generate_scene(spec);
  p = build_pyramid(s.image, 6, 8, Padding::Zero);
  pos = extract_positives(0, s.boxes, p, dims);
  REQUIRE(pos.samples.size() == 1);
  CHECK(pos.samples[0].label.first_scale() == 4);

  spec.objects = {{128, 128, 0.5}};  // smaller than the model box everywhere
  s = generate_scene(spec);
  p = build_pyramid(s.image, 6, 8, Padding::Zero);
  pos = extract_positives(0, s.boxes, p, dims);
  CHECK(pos.samples.empty());
  CHECK(pos.skipped == 1);
}

TEST_CASE("virtual positives shift the best-fit level") {
  CHECK(virtual_positives(Image(64, 64, 0.5f), std::vector<Box>{{10, 10, 40, 40}}, 0, 8).empty());
  CHECK(virtual_level_shifts(5) == std::vector<int>{-2, -1, 1, 2, 3});
  CHECK(virtual_level_shifts(7) == std::vector<int>{-2, -1, 1, 2, 3, 4, -3});

  const auto g = PyramidGeometry::standard(7, 8);
  const TemplateDims dims{4, 4};
  const double side = 32 / level_scale(3);  // best fit at level 3
  Image img(256, 256, 0.5f);
  const std::vector<Box> truth{Box::centered(128, 128, side, side)};
  REQUIRE(best_fit_level(overlap_profile(truth, 128, 128, dims, g)) == 3);

  const auto copies = virtual_positives(img, truth, 5, 8);
  REQUIRE(copies.size() == 5);
  for (const auto& c : copies) {
    REQUIRE(c.boxes.size() == 1);
    const Box& b = c.boxes[0];
    CHECK(b.width() == doctest::Approx(side * std::pow(2.0, 0.5 * c.level_shift)));
    CHECK(c.image.width == std::lround(256 * std::pow(2.0, 0.5 * c.level_shift)));
    const int lv = best_fit_level(overlap_profile(c.boxes, b.center_x(), b.center_y(), dims, g));
    CHECK(lv == 3 + c.level_shift);
  }
  // A shift of -2 halves the object: level 3 becomes level 1.
  CHECK(copies[0].level_shift == -2);

  // Copies that shrink the object below the minimum side are skipped.
  const std::vector<Box> small{Box::centered(128, 128, 12, 12)};
  const auto few = virtual_positives(img, small, 5, 8);
  for (const auto& c : few) CHECK(c.level_shift > -2);
  CHECK_THROWS_AS(virtual_positives(img, small, -1, 8), Error);
}

TEST_CASE("annotation parsing") {
  const auto a = parse_annotations("# header\nimg1.pgm 1 2 30 40 0\n\nimg2.pgm 5 5 9 9 0 # trailing\n");
  REQUIRE(a.size() == 2);
  CHECK(a[0].image == "img1.pgm");
  CHECK(a[0].box == Box{1, 2, 30, 40});
  CHECK(parse_annotations(format_annotations(a)).size() == 2);
  try {
    parse_annotations("a.pgm 1 2 3 4 0\nb.pgm 1 2 x 4 0\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_annotations("a.pgm 5 5 1 1 0\n"), ParseError);
}
