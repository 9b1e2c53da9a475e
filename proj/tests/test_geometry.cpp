#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mss/geometry.hpp"

using namespace mss;

namespace {

// Reference NMS: a detection survives iff no higher-ranked survivor overlaps
// it at or above the threshold. Ranks are computed by counting.
std::vector<Detection> nms_reference(const std::vector<Detection>& dets, double thr) {
  const std::size_t n = dets.size();
  const auto before = [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    if (dets[a].box.x1 != dets[b].box.x1) return dets[a].box.x1 < dets[b].box.x1;
    if (dets[a].box.y1 != dets[b].box.y1) return dets[a].box.y1 < dets[b].box.y1;
    return a < b;
  };
  std::vector<std::size_t> rank(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && before(j, i)) ++rank[i];
  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[rank[i]] = i;
  std::vector<bool> kept(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = by_rank[r];
    bool ok = true;
    for (std::size_t q = 0; q < r; ++q)
      if (kept[by_rank[q]] && overlap(dets[i].box, dets[by_rank[q]].box) >= thr) ok = false;
    kept[i] = ok;
  }
  std::vector<Detection> out;
  for (std::size_t r = 0; r < n; ++r)
    if (kept[by_rank[r]]) out.push_back(dets[by_rank[r]]);
  return out;
}

}  // namespace

TEST_CASE("overlap examples and properties") {
  const Box a{0, 0, 10, 10}, b{5, 0, 15, 10};
  CHECK(overlap(a, a) == 1.0);
  CHECK(overlap(a, Box{20, 20, 30, 30}) == 0.0);
  CHECK(overlap(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(overlap(a, b) == overlap(b, a));
  CHECK(overlap(a, Box{10, 0, 20, 10}) == 0.0);  // touching edges share no area
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 50);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng);
    const Box p{x, y, x + 1 + u(rng), y + 1 + u(rng)};
    const double x2 = u(rng), y2 = u(rng);
    const Box q{x2, y2, x2 + 1 + u(rng), y2 + 1 + u(rng)};
    const double o = overlap(p, q);
    CHECK(o >= 0.0);
    CHECK(o <= 1.0);
    CHECK(o == overlap(q, p));
  }
  CHECK(max_overlap(a, {}) == 0.0);
}

TEST_CASE("map_location examples") {
  const auto g = PyramidGeometry::standard(3, 8);
  CHECK(map_location(g, 80, 40, 0, {6, 4}) == PyramidLocation{7, 3, 0});
  CHECK(map_location(g, 80, 40, 2, {6, 4}) == PyramidLocation{2, 0, 2});
  CHECK(map_location(g, 0, 0, 1, {6, 4}) == PyramidLocation{-3, -2, 1});
  CHECK(map_location(g, 0, 0, 0, {5, 3}) == PyramidLocation{-3, -2, 0});
}

TEST_CASE("box_for_scale sizes") {
  const auto g = PyramidGeometry::standard(4, 8);
  const Box b0 = box_for_scale(g, {6, 4}, 100, 60, 0);
  CHECK(b0.width() == 48);
  CHECK(b0.height() == 32);
  CHECK(b0.center_x() == 100);
  const Box b2 = box_for_scale(g, {6, 4}, 100, 60, 2);
  CHECK(b2.width() == doctest::Approx(96));
  CHECK(b2.height() == doctest::Approx(64));
  const Box b1 = box_for_scale(g, {6, 4}, 100, 60, 1);
  CHECK(std::abs(b1.width() / b0.width() - std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("box_for_scale and map_location round-trip the centre") {
  const auto g = PyramidGeometry::standard(5, 8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 300);
  for (int i = 0; i < 100; ++i) {
    const double cx = u(rng), cy = u(rng);
    const TemplateDims d{4 + i % 3, 3 + i % 4};
    for (int s = 0; s < 5; ++s) {
      const Box b = box_for_scale(g, d, cx, cy, s);
      const auto loc = map_location(g, b.center_x(), b.center_y(), s, d);
      double rx, ry;
      window_center(g, loc, d, rx, ry);
      CHECK(std::abs(rx - cx) <= 8.0 / g.scales[s] * 0.5 + 1e-9);
      CHECK(std::abs(ry - cy) <= 8.0 / g.scales[s] * 0.5 + 1e-9);
      if (s == 0) {
        CHECK(std::abs(rx - cx) <= 8.0);
        CHECK(std::abs(ry - cy) <= 8.0);
      }
    }
  }
}

TEST_CASE("nms basics") {
  const Detection d{{0, 0, 10, 10}, 0.9, 0, 0};
  CHECK(nms({d}, 0.5).size() == 1);
  Detection e = d;
  e.score = 0.8;
  const auto out = nms({e, d}, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].score == 0.9);
  CHECK(nms({}, 0.5).empty());
}

TEST_CASE("nms matches the reference on random sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 40);
  std::uniform_int_distribution<int> sc(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Detection> dets;
    const int n = 1 + trial % 8;
    for (int i = 0; i < n; ++i) {
      const double x = u(rng), y = u(rng), w = 5 + u(rng) / 2, h = 5 + u(rng) / 2;
      dets.push_back({{x, y, x + w, y + h}, static_cast<double>(sc(rng)), 0, 0});  // ties on purpose
    }
    const double thr = (trial % 5) * 0.2 + 0.1;
    const auto got = nms(dets, thr);
    const auto want = nms_reference(dets, thr);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].box == want[i].box);
      CHECK(got[i].score == want[i].score);
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      for (std::size_t j = i + 1; j < got.size(); ++j) CHECK(overlap(got[i].box, got[j].box) < thr);
    const auto again = nms(got, thr);
    CHECK(again.size() == got.size());
  }
}
