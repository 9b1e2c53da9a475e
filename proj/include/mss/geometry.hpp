#ifndef MSS_GEOMETRY_HPP_
#define MSS_GEOMETRY_HPP_

#include <cmath>
#include <span>
#include <vector>

namespace mss {

/// Axis-aligned box in image pixels, inclusive-exclusive: [x1, x2) x [y1, y2).
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x2 > x1 && y2 > y1; }

  static Box centered(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  }
  Box scaled(double f) const { return {x1 * f, y1 * f, x2 * f, y2 * f}; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Template size in feature cells.
struct TemplateDims {
  int width = 0;
  int height = 0;

  int cells() const { return width * height; }
  friend bool operator==(const TemplateDims&, const TemplateDims&) = default;
};

/// Window anchor (top-left cell) in level s of a feature pyramid.
struct PyramidLocation {
  int x = 0;
  int y = 0;
  int s = 0;

  friend bool operator==(const PyramidLocation&, const PyramidLocation&) = default;
};

/// The part of a feature pyramid needed to move between image pixels and
/// level cells.
struct PyramidGeometry {
  int cell_x = 8;
  int cell_y = 8;
  std::vector<double> scales;

  int levels() const { return static_cast<int>(scales.size()); }
  static PyramidGeometry standard(int levels, int cell_size);
};

/// 2^(-s/2): the resampling factor of pyramid level s.
inline double level_scale(int s) { return std::pow(2.0, -0.5 * s); }

struct Detection {
  Box box;
  double score = 0;
  int scale = 0;
  int class_id = 0;
};

/// Intersection over union; 0 when either box is empty.
double overlap(const Box& a, const Box& b);

/// Largest overlap of `a` with any of `boxes` (0 for an empty list).
double max_overlap(const Box& a, std::span<const Box> boxes);

/// Anchor of a template-sized window at level s centred (to the nearest cell,
/// ties toward the lower index) on an image-space point.
PyramidLocation map_location(const PyramidGeometry& geom, double cx, double cy, int s,
                             TemplateDims dims);

/// Image-space box covered by a template at level s centred on (cx, cy).
Box box_for_scale(const PyramidGeometry& geom, TemplateDims dims, double cx, double cy, int s);

/// Image-space centre of the window anchored at `loc`.
void window_center(const PyramidGeometry& geom, PyramidLocation loc, TemplateDims dims, double& cx,
                   double& cy);

/// Greedy non-maximum suppression. Output sorted by descending score.
std::vector<Detection> nms(std::vector<Detection> dets, double threshold);

}  // namespace mss

#endif  // MSS_GEOMETRY_HPP_
