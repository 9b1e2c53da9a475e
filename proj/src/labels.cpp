#include "mss/labels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mss/error.hpp"

namespace mss {

int SampleLabel::first_scale() const {
  for (std::size_t s = 0; s < scales.size(); ++s)
    if (scales[s]) return static_cast<int>(s);
  return -1;
}

TemplateDims model_dims(std::span<const Box> boxes, double cell_stride) {
  if (boxes.empty()) throw Error("model_dims needs at least one positive box");
  double w = 0, h = 0;
  for (const Box& b : boxes) {
    w += b.width();
    h += b.height();
  }
  w /= boxes.size();
  h /= boxes.size();
  return {std::max(3, static_cast<int>(std::lround(w / cell_stride))),
          std::max(3, static_cast<int>(std::lround(h / cell_stride)))};
}

std::vector<double> overlap_profile(std::span<const Box> truth, double cx, double cy, TemplateDims dims,
                                    const PyramidGeometry& geom) {
  std::vector<double> f(geom.scales.size(), 0.0);
  for (std::size_t s = 0; s < f.size(); ++s) {
    const double scale = geom.scales[s];
    const Box model = Box::centered(cx * scale, cy * scale, dims.width * geom.cell_x,
                                    dims.height * geom.cell_y);
    for (const Box& t : truth) f[s] = std::max(f[s], overlap(model, t.scaled(scale)));
  }
  return f;
}

std::vector<std::uint8_t> threshold_profile(std::span<const double> profile, double threshold) {
  const std::size_t n = profile.size();
  std::vector<std::uint8_t> y(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    const bool rises = s == 0 || profile[s] >= profile[s - 1];
    const bool falls = s + 1 == n || profile[s] > profile[s + 1];
    if (rises && falls && profile[s] >= threshold) y[s] = 1;
  }
  return y;
}

int best_fit_level(std::span<const double> profile) {
  int best = 0;
  for (std::size_t s = 1; s < profile.size(); ++s)
    if (profile[s] >= profile[static_cast<std::size_t>(best)]) best = static_cast<int>(s);
  return best;
}

PositiveSet extract_positives(int image_id, std::span<const Box> truth, const FeaturePyramid& pyr,
                              TemplateDims dims, Provenance provenance) {
  PositiveSet out;
  const auto geom = pyr.geometry();
  for (const Box& b : truth) {
    const double cx = b.center_x(), cy = b.center_y();
    auto scales = threshold_profile(overlap_profile(truth, cx, cy, dims, geom));
    if (std::none_of(scales.begin(), scales.end(), [](auto v) { return v != 0; })) {
      ++out.skipped;
      continue;
    }
    TrainingSample s;
    s.descriptor = read_multiscale(pyr, cx, cy, dims);
    s.label = {+1, b, std::move(scales)};
    s.source = {image_id, cx, cy, provenance, -1};
    s.truth.assign(truth.begin(), truth.end());
    out.samples.push_back(std::move(s));
  }
  return out;
}

std::vector<int> virtual_level_shifts(int count) {
  static constexpr int kBase[] = {-2, -1, 1, 2, 3};
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    if (i < 5) {
      out.push_back(kBase[i]);
    } else {
      // Beyond the first five, alternate further out: +4, -3, +5, -4, ...
      const int k = i - 5;
      out.push_back(k % 2 == 0 ? 4 + k / 2 : -3 - k / 2);
    }
  }
  return out;
}

std::vector<VirtualCopy> virtual_positives(const Image& img, std::span<const Box> truth, int count,
                                           double min_side) {
  if (count < 0) throw Error("virtual positive count must be non-negative");
  std::vector<VirtualCopy> out;
  for (int shift : virtual_level_shifts(count)) {
    const double factor = std::pow(2.0, 0.5 * shift);
    VirtualCopy copy;
    copy.level_shift = shift;
    for (const Box& b : truth) {
      const Box r = b.scaled(factor);
      if (std::min(r.width(), r.height()) >= min_side) copy.boxes.push_back(r);
    }
    if (copy.boxes.empty()) continue;
    copy.image = resize(img, factor);
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<Annotation> parse_annotations(std::string_view text) {
  std::vector<Annotation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    Annotation a;
    if (!(fields >> a.image)) continue;
    if (!(fields >> a.box.x1 >> a.box.y1 >> a.box.x2 >> a.box.y2 >> a.class_id))
      throw ParseError(ParseError::Kind::BadValue, line_no, "expected 'image x1 y1 x2 y2 class_id'");
    std::string extra;
    if (fields >> extra) throw ParseError(ParseError::Kind::BadValue, line_no, "trailing fields");
    if (!a.box.valid()) throw ParseError(ParseError::Kind::BadValue, line_no, "degenerate box");
    out.push_back(std::move(a));
  }
  return out;
}

std::string format_annotations(std::span<const Annotation> annotations) {
  std::ostringstream out;
  out.precision(10);
  for (const auto& a : annotations)
    out << a.image << ' ' << a.box.x1 << ' ' << a.box.y1 << ' ' << a.box.x2 << ' ' << a.box.y2 << ' '
        << a.class_id << '\n';
  return out.str();
}

}  // namespace mss
