#include "mss/detect.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mss/error.hpp"
#include "mss/parallel.hpp"
#include "mss/sdca.hpp"

namespace mss {

namespace {

std::vector<bool> active_classes(const MssModel& model) {
  // Untrained classes never win; a model with no trained class scores all.
  std::vector<bool> on(model.classes);
  const bool any = model.populated_count() > 0;
  for (int k = 0; k < model.classes; ++k) on[k] = !any || model.populated(k);
  return on;
}

}  // namespace

double score_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims, std::span<const float> w,
                    double bias) {
  std::vector<float> buf(static_cast<std::size_t>(dims.cells()) * pyr.channels());
  read_window(pyr, loc, dims, buf);
  return bias + dot(w, std::span<const float>(buf));
}

void scan_center(const PyramidGeometry& geom, TemplateDims dims, int gx, int gy, int s, double& cx, double& cy) {
  window_center(geom, {gx - dims.width / 2, gy - dims.height / 2, s}, dims, cx, cy);
}

LevelScores baseline_level_scores(const FeaturePyramid& pyr, int s, std::span<const float> w, double bias,
                                  TemplateDims dims) {
  const FeatureMap& m = pyr.levels.at(static_cast<std::size_t>(s));
  if (w.size() != static_cast<std::size_t>(dims.cells()) * m.channels)
    throw Error("template length does not match the pyramid");
  LevelScores out;
  out.width = m.width;
  out.height = m.height;
  out.score.resize(static_cast<std::size_t>(m.width) * m.height);
  parallel_for(m.height, [&](int gy) {
    std::vector<float> buf(w.size());
    for (int gx = 0; gx < m.width; ++gx) {
      read_window(pyr, {gx - dims.width / 2, gy - dims.height / 2, s}, dims, buf);
      out.score[static_cast<std::size_t>(gy) * m.width + gx] = bias + dot(w, std::span<const float>(buf));
    }
  });
  return out;
}

std::vector<WindowScore> scan(const FeaturePyramid& pyr, const MssModel& model, std::vector<std::string>* warnings) {
  check_fingerprint(model, pyr);
  const auto geom = pyr.geometry();
  const auto on = active_classes(model);
  std::vector<WindowScore> out;

  if (model.family == Family::Baseline) {
    for (int s = 0; s < pyr.level_count(); ++s) {
      const FeatureMap& m = pyr.levels[s];
      if (m.width < model.dims.width || m.height < model.dims.height) {
        if (warnings) warnings->push_back("level " + std::to_string(s) + " smaller than the template; skipped");
        continue;
      }
      const LevelScores ls = baseline_level_scores(pyr, s, model.weights[0], model.biases[0], model.dims);
      for (int gy = 0; gy < ls.height; ++gy)
        for (int gx = 0; gx < ls.width; ++gx) {
          WindowScore ws;
          ws.score = ls.score[static_cast<std::size_t>(gy) * ls.width + gx];
          ws.level = s;
          ws.gx = gx;
          ws.gy = gy;
          scan_center(geom, model.dims, gx, gy, s, ws.cx, ws.cy);
          out.push_back(ws);
        }
    }
    return out;
  }

  const FeatureMap& m0 = pyr.levels.at(0);
  out.resize(static_cast<std::size_t>(m0.width) * m0.height);
  parallel_for(m0.height, [&](int gy) {
    std::vector<float> buf;
    std::vector<double> scores(model.classes);
    for (int gx = 0; gx < m0.width; ++gx) {
      WindowScore& ws = out[static_cast<std::size_t>(gy) * m0.width + gx];
      ws.gx = gx;
      ws.gy = gy;
      scan_center(geom, model.dims, gx, gy, 0, ws.cx, ws.cy);
      if (model.family == Family::Mss) {
        const std::size_t block = model.level_block(0);
        buf.resize(block * model.levels);
        read_multiscale(pyr, ws.cx, ws.cy, model.dims, buf);
        for (int k = 0; k < model.classes; ++k) {
          if (!on[k]) continue;
          const std::span<const float> wk(model.weights[k]);
          double total = model.biases[k];
          for (int s = 0; s < model.levels; ++s)
            total += dot(wk.subspan(s * block, block), std::span<const float>(buf).subspan(s * block, block));
          scores[k] = total;
        }
      } else {
        for (int k = 0; k < model.classes; ++k) {
          if (!on[k]) continue;
          const TemplateDims dk = model.class_dims(k);
          buf.resize(model.level_block(k));
          read_window(pyr, map_location(geom, ws.cx, ws.cy, 0, dk), dk, buf);
          scores[k] = model.biases[k] + dot(std::span<const float>(model.weights[k]), std::span<const float>(buf));
        }
      }
      int best = -1;
      for (int k = 0; k < model.classes; ++k)
        if (on[k] && (best < 0 || scores[k] > scores[best])) best = k;
      ws.cls = best;
      ws.score = scores[best];
    }
  });
  return out;
}

std::vector<Box> window_boxes(const MssModel& model, const PyramidGeometry& geom, int level, double cx, double cy) {
  std::vector<Box> out;
  switch (model.family) {
    case Family::Baseline:
      out.push_back(box_for_scale(geom, model.dims, cx, cy, level));
      break;
    case Family::Mss:
      for (int k = 0; k < model.classes; ++k) out.push_back(box_for_scale(geom, model.dims, cx, cy, k));
      break;
    case Family::TemplatePyramid:
      for (int k = 0; k < model.classes; ++k) {
        const TemplateDims dk = model.class_dims(k);
        out.push_back(Box::centered(cx, cy, dk.width * geom.cell_x, dk.height * geom.cell_y));
      }
      break;
  }
  return out;
}

Box window_box(const MssModel& model, const PyramidGeometry& geom, const WindowScore& w) {
  switch (model.family) {
    case Family::Baseline: return box_for_scale(geom, model.dims, w.cx, w.cy, w.level);
    case Family::Mss: return box_for_scale(geom, model.dims, w.cx, w.cy, w.cls);
    case Family::TemplatePyramid: {
      const TemplateDims dk = model.class_dims(w.cls);
      return Box::centered(w.cx, w.cy, dk.width * geom.cell_x, dk.height * geom.cell_y);
    }
  }
  return {};
}

std::vector<float> window_descriptor(const FeaturePyramid& pyr, const MssModel& model, int level, double cx,
                                     double cy) {
  const auto geom = pyr.geometry();
  switch (model.family) {
    case Family::Baseline:
      return read_window(pyr, map_location(geom, cx, cy, level, model.dims), model.dims);
    case Family::Mss:
      return read_multiscale(pyr, cx, cy, model.dims);
    case Family::TemplatePyramid: {
      std::vector<float> out;
      for (int k = 0; k < model.classes; ++k) {
        const TemplateDims dk = model.class_dims(k);
        const auto w = read_window(pyr, map_location(geom, cx, cy, 0, dk), dk);
        out.insert(out.end(), w.begin(), w.end());
      }
      return out;
    }
  }
  return {};
}

namespace {

std::vector<Detection> to_detections(const FeaturePyramid& pyr, const MssModel& model,
                                     const std::vector<WindowScore>& windows, double threshold) {
  const auto geom = pyr.geometry();
  std::vector<Detection> out;
  for (const WindowScore& w : windows) {
    if (!(w.score > threshold)) continue;
    Detection d;
    d.box = window_box(model, geom, w);
    d.score = w.score;
    d.scale = model.family == Family::Baseline ? w.level : w.cls;
    out.push_back(d);
  }
  return out;
}

void require_family(const MssModel& model, Family f) {
  if (model.family != f)
    throw Error("expected a " + to_string(f) + " model, got " + to_string(model.family));
}

}  // namespace

std::vector<Detection> score_baseline(const FeaturePyramid& pyr, const MssModel& model, double threshold,
                                      std::vector<std::string>* warnings) {
  require_family(model, Family::Baseline);
  return to_detections(pyr, model, scan(pyr, model, warnings), threshold);
}

std::vector<Detection> score_template_pyramid(const FeaturePyramid& pyr, const MssModel& model, double threshold) {
  require_family(model, Family::TemplatePyramid);
  return to_detections(pyr, model, scan(pyr, model), threshold);
}

MssScores score_mss(const FeaturePyramid& pyr, const MssModel& model, double threshold, double nms_threshold) {
  require_family(model, Family::Mss);
  const auto windows = scan(pyr, model);
  MssScores out;
  out.map.width = pyr.levels.at(0).width;
  out.map.height = pyr.levels.at(0).height;
  out.map.score.reserve(windows.size());
  out.map.scale.reserve(windows.size());
  for (const WindowScore& w : windows) {
    out.map.score.push_back(w.score);
    out.map.scale.push_back(w.cls);
  }
  out.detections = nms(to_detections(pyr, model, windows, threshold), nms_threshold);
  return out;
}

std::vector<Detection> detect(const FeaturePyramid& pyr, const MssModel& model, const DetectOptions& options) {
  return nms(to_detections(pyr, model, scan(pyr, model), options.threshold), options.nms);
}

FeaturePyramid pyramid_for_model(const Image& img, const MssModel& model) {
  if (model.kind != FeatureKind::Hog) throw Error("model was trained on imported features; supply a pyramid file");
  const int levels = model.family == Family::TemplatePyramid ? 1 : model.levels;
  const int cell = static_cast<int>(model.cell_stride);
  if (cell != model.cell_stride) throw Error("model cell stride is not an integer pixel count");
  FeaturePyramid pyr = build_pyramid(img, levels, cell, model.padding);
  if (pyr.truncated)
    throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) + " is too small for " +
                std::to_string(levels) + " pyramid levels");
  return pyr;
}

std::vector<Detection> detect_image(const Image& img, const MssModel& model, const DetectOptions& options) {
  return detect(pyramid_for_model(img, model), model, options);
}

std::string format_detections(std::string_view image_id, std::span<const Detection> dets) {
  std::string out;
  char buf[256];
  for (const Detection& d : dets) {
    std::snprintf(buf, sizeof buf, " %.9g %.6g %.6g %.6g %.6g %d\n", d.score, d.box.x1, d.box.y1, d.box.x2,
                  d.box.y2, d.scale);
    out.append(image_id);
    out += buf;
  }
  return out;
}

std::vector<ImageDetection> parse_detections(std::string_view text) {
  std::vector<ImageDetection> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ImageDetection d;
    if (!(ls >> d.image_id >> d.det.score >> d.det.box.x1 >> d.det.box.y1 >> d.det.box.x2 >> d.det.box.y2 >>
          d.det.scale))
      throw ParseError(ParseError::Kind::BadValue, line_no, "expected 'image_id score x1 y1 x2 y2 scale_idx'");
    std::string extra;
    if (ls >> extra) throw ParseError(ParseError::Kind::BadValue, line_no, "trailing fields in detection line");
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mss
