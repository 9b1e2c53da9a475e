#include "mss/geometry.hpp"

#include <algorithm>

namespace mss {

PyramidGeometry PyramidGeometry::standard(int levels, int cell_size) {
  PyramidGeometry g;
  g.cell_x = cell_size;
  g.cell_y = cell_size;
  for (int s = 0; s < levels; ++s) g.scales.push_back(level_scale(s));
  return g;
}

double overlap(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double max_overlap(const Box& a, std::span<const Box> boxes) {
  double best = 0.0;
  for (const Box& b : boxes) best = std::max(best, overlap(a, b));
  return best;
}

namespace {

// Nearest integer, exact halves resolved toward the lower index.
int round_half_down(double v) { return static_cast<int>(std::ceil(v - 0.5 - 1e-9)); }

}  // namespace

PyramidLocation map_location(const PyramidGeometry& geom, double cx, double cy, int s,
                             TemplateDims dims) {
  const double scale = geom.scales.at(static_cast<std::size_t>(s));
  const double ax = cx * scale / geom.cell_x - 0.5 * dims.width;
  const double ay = cy * scale / geom.cell_y - 0.5 * dims.height;
  return {round_half_down(ax), round_half_down(ay), s};
}

Box box_for_scale(const PyramidGeometry& geom, TemplateDims dims, double cx, double cy, int s) {
  const double scale = geom.scales.at(static_cast<std::size_t>(s));
  return Box::centered(cx, cy, dims.width * geom.cell_x / scale, dims.height * geom.cell_y / scale);
}

void window_center(const PyramidGeometry& geom, PyramidLocation loc, TemplateDims dims, double& cx,
                   double& cy) {
  const double scale = geom.scales.at(static_cast<std::size_t>(loc.s));
  cx = (loc.x + 0.5 * dims.width) * geom.cell_x / scale;
  cy = (loc.y + 0.5 * dims.height) * geom.cell_y / scale;
}

std::vector<Detection> nms(std::vector<Detection> dets, double threshold) {
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    return a.box.y1 < b.box.y1;
  });
  std::vector<Detection> kept;
  for (const Detection& d : dets) {
    bool keep = true;
    for (const Detection& k : kept) {
      if (overlap(d.box, k.box) >= threshold) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(d);
  }
  return kept;
}

}  // namespace mss
